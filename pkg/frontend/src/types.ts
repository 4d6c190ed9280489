/** Payload shapes exchanged with the HIL service. */

export interface ActPayload {
  intent: string;
  inform_slots: Record<string, string>;
  request_slots: string[];
}

export interface DomainSchema {
  name: string;
  intents: string[];
  shared_slots: string[];
  domain_slots: string[];
  kb_slots: string[];
}

export interface GoalPayload {
  inform_slots: Record<string, string>;
  request_slots: string[];
}

export interface TranscriptEntry {
  role: 'agent' | 'user';
  turn: number;
  act: ActPayload;
  emotion_labels?: Record<string, number>;
}

export interface SessionSnapshot {
  session_id: string;
  domain: string;
  volunteer: string;
  goal: GoalPayload;
  status: string;
  turn: number;
  transcript: TranscriptEntry[];
  agent_act?: ActPayload;
}

export interface TurnResponse {
  agent_act: ActPayload | null;
  status: string;
  turn: number;
}

export interface ApiError {
  code: string;
  message: string;
  field?: string;
}

export interface ExportCurvePoint {
  session_index: number;
  session_id: string;
  success: number;
  cumulative_success_rate: number;
}

export interface ExportResponse {
  session_files: string[];
  curve_file: string;
  curve: ExportCurvePoint[];
}

export const EMOTIONS = ['angry', 'disgust', 'fear', 'happy', 'sad', 'surprise'] as const;
export type Emotion = (typeof EMOTIONS)[number];
