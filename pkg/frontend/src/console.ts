/** DOM wiring for the HIL console: chat view, act composer form, emotion
 * sliders, goal card, history browser, and export trigger. */

import { ApiClient, ApiRequestError } from './api.js';
import { ConsoleSession } from './session.js';
import { renderTurn } from './render.js';
import { EMOTIONS, type ActPayload, type SessionSnapshot, type Emotion } from './types.js';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class ConsoleApp {
  private readonly api: ApiClient;
  private session: ConsoleSession;
  private history: string[] = [];

  private chat!: HTMLElement;
  private goalCard!: HTMLElement;
  private form!: HTMLElement;
  private statusBar!: HTMLElement;
  private errorBar!: HTMLElement;
  private submitButton!: HTMLButtonElement;
  private intentSelect!: HTMLSelectElement;
  private informList!: HTMLElement;
  private requestList!: HTMLElement;
  private sliders = new Map<Emotion, HTMLInputElement>();

  constructor(private readonly root: HTMLElement, baseUrl = '') {
    this.api = new ApiClient(baseUrl);
    this.session = new ConsoleSession(this.api);
  }

  mount(): void {
    this.root.innerHTML = '';
    const bar = el('div', 'toolbar');
    const newButton = el('button', undefined, 'New session');
    newButton.onclick = () => void this.startSession();
    const exportButton = el('button', undefined, 'Export sessions');
    exportButton.onclick = () => void this.exportSessions();
    bar.append(newButton, exportButton);

    this.statusBar = el('div', 'status', 'no session');
    this.errorBar = el('div', 'error');
    this.goalCard = el('div', 'goal-card');
    this.chat = el('div', 'chat');
    this.form = el('div', 'composer');
    this.root.append(bar, this.statusBar, this.errorBar, this.goalCard, this.chat, this.form);
  }

  private async startSession(): Promise<void> {
    try {
      const snapshot = await this.session.start({ volunteer: 'console' });
      this.history.push(snapshot.session_id);
      this.renderGoal(snapshot);
      this.renderTranscript(snapshot);
      this.buildComposerForm();
      this.setStatus(snapshot.status);
      this.errorBar.textContent = '';
    } catch (error) {
      this.showError(error);
    }
  }

  private renderGoal(snapshot: SessionSnapshot): void {
    this.goalCard.innerHTML = '';
    this.goalCard.append(el('h3', undefined, `Your goal (${snapshot.domain})`));
    const constraints = Object.entries(snapshot.goal.inform_slots)
      .map(([slot, value]) => `${slot.replace(/_/g, ' ')} = ${value}`)
      .join(', ');
    this.goalCard.append(el('p', undefined, `You know: ${constraints || '(nothing)'}`));
    this.goalCard.append(
      el('p', undefined, `You want to find out: ${snapshot.goal.request_slots.join(', ')}`),
    );
  }

  private renderTranscript(snapshot: SessionSnapshot): void {
    this.chat.innerHTML = '';
    for (const entry of snapshot.transcript) {
      const bubble = el('div', `bubble ${entry.role}`);
      bubble.append(el('span', 'who', entry.role === 'agent' ? 'Agent' : 'You'));
      bubble.append(el('span', 'text', renderTurn(entry.act)));
      this.chat.append(bubble);
    }
    this.chat.scrollTop = this.chat.scrollHeight;
  }

  private buildComposerForm(): void {
    const composer = this.session.composer;
    if (!composer) return;
    this.form.innerHTML = '';

    this.intentSelect = el('select');
    for (const intent of composer.intentOptions()) {
      const option = el('option', undefined, intent) as HTMLOptionElement;
      option.value = intent;
      this.intentSelect.append(option);
    }
    this.intentSelect.value = 'inform';

    this.informList = el('div', 'slot-list');
    this.requestList = el('div', 'slot-list');
    const addInform = el('button', undefined, '+ inform slot');
    addInform.onclick = () => this.informList.append(this.slotRow(composer.slotOptions(), true));
    const addRequest = el('button', undefined, '+ request slot');
    addRequest.onclick = () => this.requestList.append(this.slotRow(composer.slotOptions(), false));

    const sliderBox = el('div', 'sliders');
    sliderBox.append(el('h4', undefined, 'How do you feel? (1-5)'));
    this.sliders.clear();
    for (const emotion of EMOTIONS) {
      const row = el('label', 'slider-row', `${emotion} `);
      const slider = el('input') as HTMLInputElement;
      slider.type = 'range';
      slider.min = '1';
      slider.max = '5';
      slider.step = '1';
      slider.value = '1';
      slider.oninput = () => {
        this.session.annotation.setLevel(emotion, Number(slider.value));
        this.updateSubmitState();
      };
      this.sliders.set(emotion, slider);
      row.append(slider);
      sliderBox.append(row);
    }
    const neutral = el('button', undefined, 'neutral (all 1)');
    neutral.onclick = () => {
      this.session.annotation.setNeutral();
      for (const slider of this.sliders.values()) slider.value = '1';
      this.updateSubmitState();
    };
    sliderBox.append(neutral);

    this.submitButton = el('button', 'submit', 'Send') as HTMLButtonElement;
    this.submitButton.disabled = true;
    this.submitButton.onclick = () => void this.submit();

    this.form.append(
      el('h4', undefined, 'Your reply'),
      this.intentSelect,
      el('div', undefined, 'Tell the agent:'),
      this.informList,
      addInform,
      el('div', undefined, 'Ask the agent:'),
      this.requestList,
      addRequest,
      sliderBox,
      this.submitButton,
    );
    this.intentSelect.onchange = () => this.updateSubmitState();
  }

  private slotRow(options: string[], withValue: boolean): HTMLElement {
    const row = el('div', 'slot-row');
    const select = el('select');
    for (const slot of options) {
      const option = el('option', undefined, slot) as HTMLOptionElement;
      option.value = slot;
      select.append(option);
    }
    row.append(select);
    if (withValue) {
      const value = el('input') as HTMLInputElement;
      value.placeholder = 'value';
      value.oninput = () => this.updateSubmitState();
      row.append(value);
    }
    const remove = el('button', undefined, 'x');
    remove.onclick = () => {
      row.remove();
      this.updateSubmitState();
    };
    row.append(remove);
    this.updateSubmitState();
    return row;
  }

  private collectAct(): ActPayload {
    const informSlots: Record<string, string> = {};
    for (const row of this.informList.children) {
      const select = row.querySelector('select') as HTMLSelectElement;
      const value = row.querySelector('input') as HTMLInputElement;
      if (select && value && value.value.trim() !== '') {
        informSlots[select.value] = value.value.trim();
      }
    }
    const requestSlots: string[] = [];
    for (const row of this.requestList.children) {
      const select = row.querySelector('select') as HTMLSelectElement;
      if (select) requestSlots.push(select.value);
    }
    return {
      intent: this.intentSelect.value,
      inform_slots: informSlots,
      request_slots: [...requestSlots].sort(),
    };
  }

  private updateSubmitState(): void {
    if (!this.submitButton) return;
    this.submitButton.disabled = !this.session.canSubmit(this.collectAct());
  }

  private async submit(): Promise<void> {
    try {
      const outcome = await this.session.submitTurn(this.collectAct());
      const snapshot = await this.session.refresh();
      this.renderTranscript(snapshot);
      this.setStatus(outcome.response.status);
      if (outcome.terminal) {
        this.submitButton.disabled = true;
        this.form.classList.add('read-only');
      } else {
        for (const slider of this.sliders.values()) slider.value = '1';
        this.updateSubmitState();
      }
      this.errorBar.textContent = '';
    } catch (error) {
      this.showError(error);
    }
  }

  private async exportSessions(): Promise<void> {
    try {
      const result = await this.api.exportSessions();
      const rate = result.curve.length
        ? result.curve[result.curve.length - 1].cumulative_success_rate
        : 0;
      this.setStatus(
        `exported ${result.session_files.length} sessions; success rate ${rate.toFixed(2)}`,
      );
    } catch (error) {
      this.showError(error);
    }
  }

  private setStatus(text: string): void {
    this.statusBar.textContent = `status: ${text}`;
    if (text !== 'ongoing') {
      this.statusBar.classList.add('terminal');
    } else {
      this.statusBar.classList.remove('terminal');
    }
  }

  private showError(error: unknown): void {
    if (error instanceof ApiRequestError) {
      const field = error.body.field ? ` (${error.body.field})` : '';
      this.errorBar.textContent = `${error.body.message}${field}`;
    } else {
      this.errorBar.textContent = String(error);
    }
  }
}
