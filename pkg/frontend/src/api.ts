import type {
  AppConfig,
  AssessmentResult,
  FeedbackReport,
  Mode,
  PretestItem,
  SessionView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    detail: string,
  ) {
    super(detail);
  }

  get busy(): boolean {
    return this.status === 409 && this.code === "Busy";
  }
}

type FetchLike = typeof fetch;

/** Thin typed client over the session API; inject `fetch` in tests. */
export class ApiClient {
  constructor(
    private base: string = "",
    private fetcher: FetchLike = fetch.bind(globalThis),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetcher(this.base + path, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      throw new ApiError(
        response.status,
        (body as { error?: string }).error ?? "HttpError",
        (body as { detail?: string }).detail ?? response.statusText,
      );
    }
    return body as T;
  }

  getConfig(): Promise<AppConfig> {
    return this.request("/config");
  }

  createSession(mode: Mode, practice: string[], heroId?: string): Promise<SessionView> {
    return this.request("/sessions", {
      method: "POST",
      body: JSON.stringify({ mode, practice, hero_id: heroId ?? null }),
    });
  }

  getView(sessionId: string): Promise<SessionView> {
    return this.request(`/sessions/${sessionId}`);
  }

  submitTextTurn(sessionId: string, transcript: string): Promise<SessionView> {
    return this.request(`/sessions/${sessionId}/turns`, {
      method: "POST",
      body: JSON.stringify({ transcript }),
    });
  }

  submitAudioTurn(
    sessionId: string,
    dataB64: string,
    sidecarText?: string,
  ): Promise<SessionView> {
    return this.request(`/sessions/${sessionId}/turns`, {
      method: "POST",
      body: JSON.stringify({
        audio: { data_b64: dataB64, sidecar_text: sidecarText ?? null },
      }),
    });
  }

  submitPretest(sessionId: string, items: PretestItem[]): Promise<AssessmentResult> {
    return this.request(`/sessions/${sessionId}/pretest`, {
      method: "POST",
      body: JSON.stringify({ items }),
    });
  }

  getFeedback(sessionId: string): Promise<FeedbackReport> {
    return this.request(`/sessions/${sessionId}/feedback`);
  }

  submitPosttest(
    sessionId: string,
    responses: Array<{ phrase_id: string; definition: string; sentence: string }>,
  ): Promise<AssessmentResult> {
    return this.request(`/sessions/${sessionId}/posttest`, {
      method: "POST",
      body: JSON.stringify({ responses }),
    });
  }

  submitSurvey(sessionId: string, answers: number[]): Promise<{ recorded: boolean }> {
    return this.request(`/sessions/${sessionId}/survey`, {
      method: "POST",
      body: JSON.stringify({ answers }),
    });
  }
}
