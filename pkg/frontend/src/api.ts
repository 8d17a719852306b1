/** Typed client for the labeling service under /api/v1. */

export interface ObjectOption {
  code: number;
  name: string;
}

export interface TrialInfo {
  id: string;
  task: string;
  frame_count: number;
  vocabulary: ObjectOption[];
  progress: ObjectOption[];
  variables: string[];
}

export interface SessionSnapshot {
  id: string;
  trial: string;
  annotator: string;
  frame_count: number;
  version: number;
  labels: Record<string, string>;
}

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly variable: string | null = null,
    readonly version: number | null = null,
  ) {
    super(message);
    this.name = "ApiRequestError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class LabelServiceClient {
  private readonly fetchImpl: FetchLike;

  constructor(
    readonly baseUrl: string = "",
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/v1${path}`, init);
    if (!response.ok) {
      let detail: Record<string, unknown> = {};
      try {
        detail = (await response.json()).detail ?? {};
      } catch {
        // non-JSON error body; fall through with generic fields
      }
      throw new ApiRequestError(
        response.status,
        (detail.error as string) ?? `HTTP${response.status}`,
        (detail.message as string) ?? response.statusText,
        (detail.variable as string | null) ?? null,
        (detail.version as number | null) ?? null,
      );
    }
    return response;
  }

  async listTrials(): Promise<TrialInfo[]> {
    return (await this.request("/trials")).json();
  }

  async getSession(sessionId: string): Promise<SessionSnapshot> {
    return (await this.request(`/sessions/${sessionId}`)).json();
  }

  async putLabel(
    sessionId: string,
    frame: number,
    state: string,
    baseVersion: number,
  ): Promise<{ version: number }> {
    const response = await this.request(`/sessions/${sessionId}/labels`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ frame, state, base_version: baseVersion }),
    });
    return response.json();
  }

  async carry(
    sessionId: string,
    fromFrame: number,
    toFrame: number,
  ): Promise<{ version: number }> {
    const response = await this.request(`/sessions/${sessionId}/carry`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ from_frame: fromFrame, to_frame: toFrame }),
    });
    return response.json();
  }

  async exportTranscript(sessionId: string): Promise<string> {
    return (await this.request(`/sessions/${sessionId}/export`)).text();
  }

  frameUrl(trialId: string, frame: number): string {
    return `${this.baseUrl}/api/v1/trials/${trialId}/frames/${frame}`;
  }
}
