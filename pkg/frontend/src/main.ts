// Boot: pick the story, create or resume a session, keep the session id
// in the URL hash so a reload lands back in the same game.

import { ApiClient } from "./api.js";
import { PlayFlow } from "./flow.js";
import { render } from "./ui.js";

const DEFAULT_STORY = "anchorhead-day2";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app element");
  }
  const api = new ApiClient("");
  const flow = new PlayFlow(api);
  flow.subscribe(() => {
    render(flow, root);
    if (flow.sessionId) {
      window.location.hash = flow.sessionId;
    }
  });
  render(flow, root);

  const fromHash = window.location.hash.replace(/^#/, "");
  if (fromHash) {
    try {
      await flow.resume(fromHash);
      return;
    } catch {
      // stale session id in the hash: fall through to a fresh game
    }
  }
  const stories = await api.stories();
  const story = stories.find((s) => s.id === DEFAULT_STORY) ?? stories[0];
  await flow.start(story.id);
}

void boot();
