/** Typed fetch client for the HIL service endpoints. */

import type {
  ActPayload,
  ApiError,
  DomainSchema,
  ExportResponse,
  SessionSnapshot,
  TurnResponse,
} from './types.js';

export class ApiRequestError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ApiError,
  ) {
    super(`${body.code}: ${body.message}`);
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    throw new ApiRequestError(response.status, body as ApiError);
  }
  return body as T;
}

export class ApiClient {
  constructor(private readonly baseUrl: string = '') {}

  async createSession(options: {
    domain?: string;
    personality?: Record<string, number>;
    volunteer?: string;
    seed?: number;
  }): Promise<SessionSnapshot> {
    const response = await fetch(`${this.baseUrl}/sessions`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(options),
    });
    return parseOrThrow<SessionSnapshot>(response);
  }

  async postTurn(
    sessionId: string,
    act: ActPayload,
    labels: Record<string, number>,
  ): Promise<TurnResponse> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/turns`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ user_act: act, emotion_labels: labels }),
    });
    return parseOrThrow<TurnResponse>(response);
  }

  async getSession(sessionId: string): Promise<SessionSnapshot> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}`);
    return parseOrThrow<SessionSnapshot>(response);
  }

  async getSchema(domain: string): Promise<DomainSchema> {
    const response = await fetch(`${this.baseUrl}/schema/${domain}`);
    return parseOrThrow<DomainSchema>(response);
  }

  async exportSessions(): Promise<ExportResponse> {
    const response = await fetch(`${this.baseUrl}/export`);
    return parseOrThrow<ExportResponse>(response);
  }
}
