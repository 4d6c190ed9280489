/** Console-side session driver: combines the composer, the annotation
 * form and the API client into the submit path the UI uses.  Tests drive
 * scripted sessions through this class so the console path and the raw
 * API provably produce the same transcripts. */

import { ApiClient } from './api.js';
import { ActComposer } from './composer.js';
import { AnnotationForm } from './annotation.js';
import type { ActPayload, SessionSnapshot, TurnResponse } from './types.js';

export interface TurnOutcome {
  response: TurnResponse;
  terminal: boolean;
}

export class ConsoleSession {
  readonly annotation = new AnnotationForm();
  composer: ActComposer | null = null;
  snapshot: SessionSnapshot | null = null;
  status = 'idle';

  constructor(private readonly api: ApiClient) {}

  get sessionId(): string {
    if (!this.snapshot) throw new Error('no active session');
    return this.snapshot.session_id;
  }

  async start(options: {
    domain?: string;
    personality?: Record<string, number>;
    volunteer?: string;
    seed?: number;
  }): Promise<SessionSnapshot> {
    this.snapshot = await this.api.createSession(options);
    this.status = this.snapshot.status;
    const schema = await this.api.getSchema(this.snapshot.domain);
    this.composer = new ActComposer(schema);
    return this.snapshot;
  }

  /** Submission gate used by the UI: a complete annotation and a valid act. */
  canSubmit(act: ActPayload | null): boolean {
    if (!this.composer || !act || this.status !== 'ongoing') return false;
    return this.annotation.isComplete() && this.composer.validate(act).length === 0;
  }

  async submitTurn(act: ActPayload): Promise<TurnOutcome> {
    if (!this.composer) throw new Error('no active session');
    const problems = this.composer.validate(act);
    if (problems.length > 0) {
      throw new Error(problems.join('; '));
    }
    const labels = this.annotation.toLabels();
    const response = await this.api.postTurn(this.sessionId, act, labels);
    this.status = response.status;
    this.annotation.reset();
    return { response, terminal: response.status !== 'ongoing' };
  }

  async refresh(): Promise<SessionSnapshot> {
    this.snapshot = await this.api.getSession(this.sessionId);
    this.status = this.snapshot.status;
    return this.snapshot;
  }
}
