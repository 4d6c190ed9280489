/** Schema-driven dialogue-act composer.
 *
 * Every selectable intent and slot comes from the schema served by the
 * backend; the console never invents options of its own.  "terminating"
 * must carry no slots, mirroring the server-side rule.
 */

import type { ActPayload, DomainSchema } from './types.js';

export class ActComposer {
  constructor(private readonly schema: DomainSchema) {}

  intentOptions(): string[] {
    return [...this.schema.intents].sort();
  }

  slotOptions(): string[] {
    return [...this.schema.shared_slots, ...this.schema.domain_slots].sort();
  }

  validate(act: ActPayload): string[] {
    const problems: string[] = [];
    if (!this.schema.intents.includes(act.intent)) {
      problems.push(`unknown intent: ${act.intent}`);
    }
    const slots = new Set(this.slotOptions());
    for (const slot of Object.keys(act.inform_slots)) {
      if (!slots.has(slot)) problems.push(`unknown inform slot: ${slot}`);
    }
    for (const slot of act.request_slots) {
      if (!slots.has(slot)) problems.push(`unknown request slot: ${slot}`);
    }
    if (
      act.intent === 'terminating' &&
      (Object.keys(act.inform_slots).length > 0 || act.request_slots.length > 0)
    ) {
      problems.push('a terminating act carries no slots');
    }
    return problems;
  }

  /** Build a validated act; request slots are kept sorted so the payload
   * is identical however the form fields were filled in. */
  build(
    intent: string,
    informSlots: Record<string, string> = {},
    requestSlots: string[] = [],
  ): ActPayload {
    const act: ActPayload = {
      intent,
      inform_slots: { ...informSlots },
      request_slots: [...requestSlots].sort(),
    };
    const problems = this.validate(act);
    if (problems.length > 0) {
      throw new Error(problems.join('; '));
    }
    return act;
  }
}
