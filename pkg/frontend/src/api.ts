// Typed client for the session service. All state lives server-side;
// this module only moves JSON back and forth.

export interface ServerAction {
  verb: string;
  subject: string;
  object?: string;
  label: string;
}

export interface ServerView {
  session_id: string;
  story_id: string;
  game_index: number;
  location: string;
  description: string;
  items: string[];
  characters: string[];
  inventory: string[];
  discovered_count: number;
  tick: number;
  ended: boolean;
  ending?: string;
  ending_label?: string;
  questionnaire_done: boolean;
  actions: ServerAction[];
}

export interface Statement {
  text: string;
  factor: string;
  polarity: string;
  scale: "level" | "agreement";
}

export interface Profile {
  f: number;
  gE: number;
  pE: number;
  p: number;
  binarized: { f: number; gE: number; pE: number; p: number };
}

export interface StoryInfo {
  id: string;
  title: string;
  plot_points: number;
  endings: number;
}

export interface ActionResult {
  triggered: string[];
  view: ServerView;
}

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) {
      let code = "http-error";
      let message = `HTTP ${response.status}`;
      try {
        const body = await response.json();
        code = body.code ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body; keep the defaults
      }
      throw new ApiError(code, message, response.status);
    }
    return response.json() as Promise<T>;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  stories(): Promise<StoryInfo[]> {
    return this.request<StoryInfo[]>("/api/stories");
  }

  questionnaire(): Promise<{ statements: Statement[] }> {
    return this.request<{ statements: Statement[] }>("/api/questionnaire");
  }

  createSession(storyId: string, priorSessionId?: string): Promise<ServerView> {
    const body: Record<string, string> = { story_id: storyId };
    if (priorSessionId) {
      body.prior_session_id = priorSessionId;
    }
    return this.post<ServerView>("/api/sessions", body);
  }

  getView(sessionId: string): Promise<ServerView> {
    return this.request<ServerView>(`/api/sessions/${sessionId}`);
  }

  postAction(
    sessionId: string,
    action: { verb: string; subject: string; object?: string },
    idempotencyToken: string,
  ): Promise<ActionResult> {
    return this.post<ActionResult>(`/api/sessions/${sessionId}/actions`, {
      ...action,
      idempotency_token: idempotencyToken,
    });
  }

  postQuestionnaire(sessionId: string, answers: number[]): Promise<Profile> {
    return this.post<Profile>(`/api/sessions/${sessionId}/questionnaire`, { answers });
  }

  async humanTraces(storyId?: string): Promise<string[]> {
    const query = storyId ? `?story=${encodeURIComponent(storyId)}` : "";
    const response = await this.fetchImpl(`${this.base}/api/traces${query}`);
    if (!response.ok) {
      throw new ApiError("http-error", `HTTP ${response.status}`, response.status);
    }
    const text = await response.text();
    return text.split("\n").filter((line) => line.trim().length > 0);
  }
}
