// DOM layer: renders the flow state and wires events back into it.
// Everything is a plain <button> or <input>, so the whole client is
// keyboard-operable out of the box.

import { ServerAction, Statement } from "./api.js";
import { PlayFlow } from "./flow.js";

const AGREEMENT_LABELS = ["strongly disagree", "disagree", "neutral", "agree", "strongly agree"];
const LEVEL_LABELS = ["very low", "low", "moderate", "high", "very high"];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function scaleLabels(statement: Statement): string[] {
  return statement.scale === "level" ? LEVEL_LABELS : AGREEMENT_LABELS;
}

function renderQuestionnaire(flow: PlayFlow, root: HTMLElement): void {
  const form = el("form", "questionnaire");
  form.addEventListener("submit", (event) => event.preventDefault());
  form.append(el("h2", undefined, "Before you play"));
  form.append(el("p", "hint",
    "Tell us how you usually play. Every row needs an answer before the story unlocks."));

  flow.statements.forEach((statement, index) => {
    const fieldset = el("fieldset");
    fieldset.append(el("legend", undefined, statement.text));
    const labels = scaleLabels(statement);
    for (let value = 1; value <= 5; value++) {
      const label = el("label", "likert-option");
      const input = el("input");
      input.type = "radio";
      input.name = `statement-${index}`;
      input.value = String(value);
      input.checked = flow.answers[index] === value;
      input.addEventListener("change", () => flow.setAnswer(index, value));
      label.append(input, el("span", undefined, labels[value - 1]));
      fieldset.append(label);
    }
    form.append(fieldset);
  });

  const submit = el("button", "primary", "Start the story");
  submit.type = "submit";
  submit.disabled = !flow.allAnswered;
  submit.addEventListener("click", () => {
    void flow.submitQuestionnaire().catch(() => undefined);
  });
  form.append(submit);
  if (flow.error) {
    form.append(el("p", "error", flow.error));
  }
  root.append(form);
}

function actionKey(action: ServerAction): string {
  return [action.verb, action.subject, action.object ?? ""].join("|");
}

function renderPlay(flow: PlayFlow, root: HTMLElement): void {
  const view = flow.view;
  if (!view) {
    return;
  }
  const main = el("div", "play");

  const status = el("div", "status");
  status.append(el("span", undefined, `Plot points discovered: ${view.discovered_count}`));
  status.append(el("span", undefined, `Moves: ${view.tick}`));
  status.append(el("span", undefined, `Game ${view.game_index}`));
  main.append(status);

  const scene = el("section", "scene");
  scene.append(el("h2", undefined, view.location.replace(/-/g, " ")));
  scene.append(el("p", undefined, view.description));
  if (view.items.length) {
    scene.append(el("p", "detail", `You can see: ${view.items.join(", ")}.`));
  }
  if (view.characters.length) {
    scene.append(el("p", "detail", `Here with you: ${view.characters.join(", ")}.`));
  }
  main.append(scene);

  if (view.inventory.length) {
    const inventory = el("section", "inventory");
    inventory.append(el("h3", undefined, "Carrying"));
    const list = el("ul");
    for (const item of view.inventory) {
      list.append(el("li", undefined, item));
    }
    inventory.append(list);
    main.append(inventory);
  }

  if (view.ended) {
    const banner = el("section", "ending-banner");
    banner.append(el("h2", undefined, "The End"));
    banner.append(el("p", undefined, view.ending_label ?? view.ending ?? ""));
    const again = el("button", "primary", "Play again");
    again.addEventListener("click", () => {
      void flow.playAgain();
    });
    banner.append(again);
    main.append(banner);
  } else {
    const actions = el("section", "actions");
    actions.append(el("h3", undefined, "What do you do?"));
    for (const action of flow.actions) {
      const button = el("button", "action", action.label);
      button.dataset.action = actionKey(action);
      button.disabled = flow.busy;
      button.addEventListener("click", () => {
        void flow.act(action).catch(() => undefined);
      });
      actions.append(button);
    }
    main.append(actions);
  }

  if (flow.error) {
    main.append(el("p", "error", flow.error));
  }
  root.append(main);
}

export function render(flow: PlayFlow, root: HTMLElement): void {
  root.replaceChildren();
  switch (flow.phase) {
    case "idle":
      root.append(el("p", undefined, "Loading..."));
      break;
    case "questionnaire":
      renderQuestionnaire(flow, root);
      break;
    case "playing":
    case "ended":
      renderPlay(flow, root);
      break;
  }
}
