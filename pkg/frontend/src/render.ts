/** Deterministic verbalization of dialogue acts for the chat view. */

import type { ActPayload } from './types.js';

const REQUEST_PHRASES: Record<string, string> = {
  starttime: 'What time would you like?',
  moviename: 'Which movie would you like?',
  theater: 'Which theater would you prefer?',
  theaterchain: 'Do you prefer a particular theater chain?',
  city: 'Which city is that in?',
  state: 'Which state is that in?',
  date: 'What date works for you?',
  price: 'What price range suits you?',
  ticket: 'Shall I book the ticket?',
  number_of_people: 'How many people is that for?',
  video_format: 'Which format would you like?',
  pickup_location: 'Where should the pickup be?',
  dropoff_location: 'Where are you headed?',
  pickup_city: 'Which city is the pickup in?',
  dropoff_city: 'Which city is the dropoff in?',
  pickup_time: 'When should the taxi arrive?',
  taxi_company: 'Any preferred taxi company?',
  car_type: 'What kind of car would you like?',
  cost: 'What should it cost at most?',
  taxi: 'Shall I book the taxi?',
  name: 'Any preferred driver?',
};

const INFORM_PHRASES: Record<string, (value: string) => string> = {
  moviename: (v) => `The movie is ${v}.`,
  starttime: (v) => `It starts at ${v}.`,
  theater: (v) => `It plays at ${v}.`,
  price: (v) => `The price is ${v}.`,
  ticket: (v) => `Your ticket code is ${v}.`,
  date: (v) => `The date is ${v}.`,
  city: (v) => `The city is ${v}.`,
  cost: (v) => `The fare is ${v}.`,
  taxi: (v) => `Your booking code is ${v}.`,
  pickup_time: (v) => `Pickup is at ${v}.`,
  name: (v) => `Your driver is ${v}.`,
};

const BARE_PHRASES: Record<string, string> = {
  greeting: 'Hello!',
  thanks: "Thank you, that's everything I needed.",
  closing: 'Goodbye.',
  deny: "No, that's not right.",
  confirm_answer: 'Yes, that is correct.',
  taskcomplete: 'Your booking is complete.',
  multiple_choice: 'There are several options.',
};

export const TERMINATING_BANNER = 'The user ended the conversation.';

const KNOWN_INTENTS = new Set([
  'request', 'inform', 'deny', 'greeting', 'confirm_question', 'confirm_answer',
  'multiple_choice', 'thanks', 'closing', 'terminating', 'taskcomplete',
]);

function informSentence(slot: string, value: string): string {
  const phrase = INFORM_PHRASES[slot];
  return phrase ? phrase(value) : `The ${slot.replace(/_/g, ' ')} is ${value}.`;
}

function requestSentence(slot: string): string {
  return REQUEST_PHRASES[slot] ?? `What about the ${slot.replace(/_/g, ' ')}?`;
}

/** Render one act as display text; unknown intents fall back to raw JSON. */
export function renderTurn(act: ActPayload): string {
  if (!KNOWN_INTENTS.has(act.intent)) {
    return JSON.stringify(act);
  }
  if (act.intent === 'terminating') {
    return TERMINATING_BANNER;
  }
  const parts: string[] = [];
  if (act.intent in BARE_PHRASES) {
    parts.push(BARE_PHRASES[act.intent]);
  }
  if (act.intent === 'confirm_question') {
    const slots = [...Object.keys(act.inform_slots), ...act.request_slots];
    parts.push(
      slots.length
        ? `Can you confirm the ${slots.map((s) => s.replace(/_/g, ' ')).join(', ')}?`
        : 'Can you confirm that?',
    );
  }
  for (const [slot, value] of Object.entries(act.inform_slots)) {
    parts.push(informSentence(slot, value));
  }
  for (const slot of act.request_slots) {
    parts.push(requestSentence(slot));
  }
  if (parts.length === 0) {
    // a known intent with no phrasing and no slots (e.g. bare inform)
    return act.intent;
  }
  return parts.join(' ');
}
