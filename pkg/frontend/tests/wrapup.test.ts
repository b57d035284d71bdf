import { beforeEach, describe, expect, it, vi } from "vitest";

import { WrapupScreen } from "../src/screens/wrapup.js";
import { mockConfig, mockFeedback } from "./mockServer.js";

function mount() {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const handlers = {
    onPosttestSubmit: vi.fn(),
    onSurveySubmit: vi.fn(),
  };
  const phrases = mockConfig().inventory.slice(0, 5);
  const screen = new WrapupScreen(root, phrases, handlers);
  return { root, screen, handlers };
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("feedback report", () => {
  it("lists all five phrases with used/unused badges", () => {
    const { root, screen } = mount();
    screen.showFeedback(mockFeedback());
    const rows = [...root.querySelectorAll<HTMLElement>(".formative-row")];
    expect(rows).toHaveLength(5);
    const used = rows.filter((row) => row.querySelector(".usage-badge.used"));
    const unused = rows.filter((row) => row.querySelector(".usage-badge.unused"));
    expect(used).toHaveLength(3);
    expect(unused).toHaveLength(2);
    expect(unused[0].querySelector(".revised-example")).not.toBeNull();
  });

  it("shows general counts and specific corrections", () => {
    const { root, screen } = mount();
    screen.showFeedback(mockFeedback());
    expect(root.querySelector("#general-feedback")!.textContent).toContain("grammar: 1");
    expect(root.querySelector(".specific-entry")!.textContent).toContain("I went there");
  });
});

describe("post-test form", () => {
  it("submits a definition and sentence per phrase", () => {
    const { root, screen, handlers } = mount();
    screen.showFeedback(mockFeedback());
    for (const block of root.querySelectorAll<HTMLElement>(".posttest-block")) {
      block.querySelector<HTMLInputElement>(".posttest-definition")!.value = "a def";
      block.querySelector<HTMLInputElement>(".posttest-sentence")!.value = "a sentence";
    }
    root.querySelector<HTMLButtonElement>("#posttest-submit")!.click();
    expect(handlers.onPosttestSubmit).toHaveBeenCalledOnce();
    const responses = handlers.onPosttestSubmit.mock.calls[0][0];
    expect(responses).toHaveLength(5);
    expect(responses[0]).toMatchObject({ definition: "a def", sentence: "a sentence" });
  });

  it("renders per-item brief feedback after submission", () => {
    const { root, screen } = mount();
    screen.showFeedback(mockFeedback());
    screen.showPosttestResults(
      ["p1", "p2", "p3", "p4", "p5"].map((id) => ({
        phrase_id: id,
        definition_score: 1.0,
        sentence_score: 0.5,
        feedback: `feedback for ${id}`,
      })),
    );
    const results = [...root.querySelectorAll(".posttest-result")];
    expect(results).toHaveLength(5);
    expect(results[0].textContent).toContain("feedback for p1");
  });
});

describe("survey", () => {
  function reachSurvey() {
    const context = mount();
    context.screen.showFeedback(mockFeedback());
    context.screen.showPosttestResults(
      ["p1", "p2", "p3", "p4", "p5"].map((id) => ({
        phrase_id: id,
        definition_score: 1,
        sentence_score: 1,
        feedback: "ok",
      })),
    );
    return context;
  }

  it("requires all four answers before Finish unlocks", () => {
    const { root } = reachSurvey();
    const submit = root.querySelector<HTMLButtonElement>("#survey-submit")!;
    expect(root.querySelectorAll(".survey-question")).toHaveLength(4);
    expect(submit.disabled).toBe(true);
    for (const q of [1, 2, 3]) {
      root.querySelector<HTMLInputElement>(`input[name="q${q}"][value="4"]`)!.click();
    }
    expect(submit.disabled).toBe(true);
    root.querySelector<HTMLInputElement>('input[name="q4"][value="5"]')!.click();
    expect(submit.disabled).toBe(false);
  });

  it("submits the four answers in question order", () => {
    const { root, handlers } = reachSurvey();
    root.querySelector<HTMLInputElement>('input[name="q1"][value="5"]')!.click();
    root.querySelector<HTMLInputElement>('input[name="q2"][value="4"]')!.click();
    root.querySelector<HTMLInputElement>('input[name="q3"][value="3"]')!.click();
    root.querySelector<HTMLInputElement>('input[name="q4"][value="5"]')!.click();
    root.querySelector<HTMLButtonElement>("#survey-submit")!.click();
    expect(handlers.onSurveySubmit).toHaveBeenCalledWith([5, 4, 3, 5]);
  });
});
