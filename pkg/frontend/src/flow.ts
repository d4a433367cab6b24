// Session flow: questionnaire first, then choice-by-choice play.
//
// The flow object owns no game state beyond the latest server view; it
// guards the rules the UI must not break (no play before the
// questionnaire, one in-flight action at a time, idempotency tokens on
// every click) and notifies listeners after every change.

import { ApiClient, ApiError, Profile, ServerAction, ServerView, Statement } from "./api.js";

export type Phase = "idle" | "questionnaire" | "playing" | "ended";

function freshToken(): string {
  const anyCrypto = globalThis.crypto as Crypto | undefined;
  if (anyCrypto && "randomUUID" in anyCrypto) {
    return anyCrypto.randomUUID();
  }
  return `tok-${Date.now()}-${Math.random().toString(36).slice(2)}`;
}

export class PlayFlow {
  view: ServerView | null = null;
  statements: Statement[] = [];
  answers: (number | null)[] = [];
  profile: Profile | null = null;
  error: string | null = null;
  busy = false;

  private listeners: Array<() => void> = [];

  constructor(private api: ApiClient) {}

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  get phase(): Phase {
    if (this.view === null) {
      return "idle";
    }
    if (!this.view.questionnaire_done) {
      return "questionnaire";
    }
    return this.view.ended ? "ended" : "playing";
  }

  get sessionId(): string | null {
    return this.view?.session_id ?? null;
  }

  async start(storyId: string, priorSessionId?: string): Promise<void> {
    const [view, questionnaire] = await Promise.all([
      this.api.createSession(storyId, priorSessionId),
      this.api.questionnaire(),
    ]);
    this.view = view;
    this.statements = questionnaire.statements;
    this.answers = new Array(this.statements.length).fill(null);
    this.profile = null;
    this.error = null;
    this.notify();
  }

  async resume(sessionId: string): Promise<void> {
    const [view, questionnaire] = await Promise.all([
      this.api.getView(sessionId),
      this.api.questionnaire(),
    ]);
    this.view = view;
    this.statements = questionnaire.statements;
    this.answers = new Array(this.statements.length).fill(null);
    this.error = null;
    this.notify();
  }

  setAnswer(index: number, value: number): void {
    if (index < 0 || index >= this.answers.length) {
      throw new Error(`no statement at index ${index}`);
    }
    if (value < 1 || value > 5) {
      throw new Error(`answer ${value} outside 1..5`);
    }
    this.answers[index] = value;
    this.notify();
  }

  get allAnswered(): boolean {
    return this.answers.length > 0 && this.answers.every((a) => a !== null);
  }

  async submitQuestionnaire(): Promise<void> {
    if (this.view === null) {
      throw new Error("no session");
    }
    if (!this.allAnswered) {
      throw new Error("submission blocked until every statement is answered");
    }
    try {
      this.profile = await this.api.postQuestionnaire(
        this.view.session_id,
        this.answers.map((a) => a as number),
      );
      this.view = await this.api.getView(this.view.session_id);
      this.error = null;
    } catch (err) {
      this.error = err instanceof ApiError ? err.message : String(err);
      throw err;
    } finally {
      this.notify();
    }
  }

  /** The only actions the client will ever send: the server's own list. */
  get actions(): ServerAction[] {
    if (this.view === null || this.phase !== "playing") {
      return [];
    }
    return this.view.actions;
  }

  async act(action: ServerAction): Promise<void> {
    if (this.view === null) {
      throw new Error("no session");
    }
    if (this.phase !== "playing") {
      throw new Error("cannot act before the questionnaire or after the ending");
    }
    if (this.busy) {
      return; // a click is already in flight; ignore the double-click
    }
    const offered = this.view.actions.some(
      (a) => a.verb === action.verb && a.subject === action.subject &&
        (a.object ?? null) === (action.object ?? null),
    );
    if (!offered) {
      throw new Error("action is not offered by the server view");
    }
    this.busy = true;
    this.notify();
    try {
      const result = await this.api.postAction(
        this.view.session_id,
        { verb: action.verb, subject: action.subject, object: action.object },
        freshToken(),
      );
      this.view = result.view;
      this.error = null;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // lost a race against our own retry or a stale view: re-fetch
        this.view = await this.api.getView(this.view.session_id);
        this.error = err.message;
      } else {
        this.error = err instanceof ApiError ? err.message : String(err);
        throw err;
      }
    } finally {
      this.busy = false;
      this.notify();
    }
  }

  /** Start the next game linked to this one; the server bumps game_index. */
  async playAgain(): Promise<void> {
    if (this.view === null || !this.view.ended) {
      throw new Error("play again is only offered after an ending");
    }
    await this.start(this.view.story_id, this.view.session_id);
  }
}
