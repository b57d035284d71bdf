import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionFlow } from "../src/app.js";
import { MockBackend, boxRow, makeView } from "./mockServer.js";

async function bootToGame(backend: MockBackend, mode: "rpg" | "classroom" = "rpg") {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const flow = new SessionFlow(root, new ApiClient("", backend.fetch));
  await flow.boot();

  for (const box of [...root.querySelectorAll<HTMLInputElement>("#phrase-grid input")].slice(0, 5)) {
    box.click();
  }
  root.querySelector<HTMLButtonElement>("#continue-btn")!.click();
  for (const block of root.querySelectorAll<HTMLElement>(".familiarity-block")) {
    block
      .querySelector<HTMLInputElement>('input[value="completely_unfamiliar"]')!
      .click();
  }
  root.querySelector<HTMLButtonElement>("#familiarity-continue-btn")!.click();
  if (mode === "classroom") {
    root
      .querySelector<HTMLInputElement>('input[name="mode"][value="classroom"]')!
      .click();
  }
  root.querySelector<HTMLButtonElement>("#begin-btn")!.click();
  await vi.waitFor(() => {
    const selector = mode === "rpg" ? "#game-screen" : "#classroom-screen";
    if (!root.querySelector(selector)) throw new Error("screen not mounted yet");
  });
  return { root, flow };
}

async function typeAndSend(root: HTMLElement, text: string) {
  root.querySelector<HTMLInputElement>("#text-fallback")!.value = text;
  root.querySelector<HTMLButtonElement>("#send-btn")!.click();
}

beforeEach(() => {
  document.body.innerHTML = "";
  // jsdom has no mediaDevices; tests that need a mic stub it explicitly
  Object.defineProperty(navigator, "mediaDevices", {
    value: undefined,
    configurable: true,
  });
});

describe("session flow against the mock server", () => {
  it("boots through selection and pretest into the game screen", async () => {
    const backend = new MockBackend();
    const { root } = await bootToGame(backend);
    expect(root.querySelector("#tracker")).not.toBeNull();
    const paths = backend.calls.map((c) => `${c.method} ${c.path}`);
    expect(paths).toContain("GET /config");
    expect(paths).toContain("POST /sessions");
    expect(paths).toContain("POST /sessions/mock-session/pretest");
    const create = backend.calls.find((c) => c.path === "/sessions")!;
    expect((create.body as { practice: string[] }).practice).toHaveLength(5);
  });

  it("renders the server's view after each text turn", async () => {
    const backend = new MockBackend();
    backend.queueTurn(
      makeView({
        turn_index: 1,
        narrative: "The innkeeper waves you over.",
        practice_box: [boxRow("p1", 1, "red")],
      }),
    );
    const { root } = await bootToGame(backend);
    await typeAndSend(root, "hello there");
    await vi.waitFor(() => {
      if (
        root.querySelector("#dialogue")!.textContent !==
        "The innkeeper waves you over."
      ) {
        throw new Error("view not rendered yet");
      }
    });
    expect(
      root.querySelector<HTMLElement>('.tracker-row[data-phrase="p1"]')!.classList
        .contains("color-red"),
    ).toBe(true);
    const turnCall = backend.calls.find((c) => c.path.endsWith("/turns"))!;
    expect(turnCall.body).toEqual({ transcript: "hello there" });
  });

  it("denied microphone falls back to text and still completes a turn", async () => {
    const backend = new MockBackend();
    backend.queueTurn(makeView({ turn_index: 1, narrative: "Typed turn accepted." }));
    const { root } = await bootToGame(backend);

    // no mediaDevices in this environment: pressing record must degrade
    const record = root.querySelector<HTMLButtonElement>("#record-btn")!;
    record.dispatchEvent(new MouseEvent("mousedown"));
    await vi.waitFor(() => {
      if (record.hidden !== true) throw new Error("fallback not applied");
    });
    expect(root.querySelector("#notice")!.textContent).toContain("Microphone unavailable");

    await typeAndSend(root, "typed instead of spoken");
    await vi.waitFor(() => {
      if (root.querySelector("#dialogue")!.textContent !== "Typed turn accepted.") {
        throw new Error("turn not completed");
      }
    });
    const turnCall = backend.calls.find((c) => c.path.endsWith("/turns"))!;
    expect(turnCall.body).toEqual({ transcript: "typed instead of spoken" });
  });

  it("records and uploads audio with sidecar text when a mic exists", async () => {
    const chunks = [new Blob(["fake-audio"], { type: "audio/webm" })];

    class FakeRecorder {
      ondataavailable: ((event: { data: Blob }) => void) | null = null;
      onstop: (() => void) | null = null;
      mimeType = "audio/webm";
      start() {
        for (const data of chunks) this.ondataavailable?.({ data });
      }
      stop() {
        this.onstop?.();
      }
    }
    vi.stubGlobal("MediaRecorder", FakeRecorder);
    Object.defineProperty(navigator, "mediaDevices", {
      value: {
        getUserMedia: vi.fn().mockResolvedValue({ getTracks: () => [] }),
      },
      configurable: true,
    });

    const backend = new MockBackend();
    backend.queueTurn(makeView({ turn_index: 1, narrative: "Heard you loud and clear." }));
    const { root } = await bootToGame(backend);

    root.querySelector<HTMLInputElement>("#text-fallback")!.value = "what i said";
    const record = root.querySelector<HTMLButtonElement>("#record-btn")!;
    record.dispatchEvent(new MouseEvent("mousedown"));
    await vi.waitFor(() => {
      if (!record.classList.contains("recording")) throw new Error("mic not opened");
    });
    record.dispatchEvent(new MouseEvent("mouseup"));

    await vi.waitFor(() => {
      if (!backend.calls.some((c) => c.path.endsWith("/turns"))) {
        throw new Error("no turn submitted");
      }
    });
    const body = backend.calls.find((c) => c.path.endsWith("/turns"))!.body as {
      audio: { data_b64: string; sidecar_text: string };
    };
    expect(body.audio.sidecar_text).toBe("what i said");
    expect(atob(body.audio.data_b64)).toBe("fake-audio");
    vi.unstubAllGlobals();
  });

  it("busy reply shows a notice and re-enables input", async () => {
    const backend = new MockBackend();
    backend.queueError(409, "Busy", "turn in flight");
    const { root } = await bootToGame(backend);
    await typeAndSend(root, "first try");
    await vi.waitFor(() => {
      if (root.querySelector<HTMLElement>("#notice")!.hidden) {
        throw new Error("notice not shown");
      }
    });
    expect(root.querySelector("#notice")!.textContent).toContain("Still working");
    expect(root.querySelector<HTMLButtonElement>("#send-btn")!.disabled).toBe(false);
  });

  it("finishing the last turn flows into feedback, post-test, and survey", async () => {
    const backend = new MockBackend();
    backend.queueTurn(
      makeView({ turn_index: 12, status: "finished", narrative: "The end." }),
    );
    const { root } = await bootToGame(backend);
    await typeAndSend(root, "final words");
    await vi.waitFor(() => {
      if (!root.querySelector("#wrapup-screen")) throw new Error("no wrapup yet");
    });
    expect(root.querySelectorAll(".formative-row")).toHaveLength(5);

    for (const block of root.querySelectorAll<HTMLElement>(".posttest-block")) {
      block.querySelector<HTMLInputElement>(".posttest-definition")!.value = "a def";
      block.querySelector<HTMLInputElement>(".posttest-sentence")!.value = "a use";
    }
    root.querySelector<HTMLButtonElement>("#posttest-submit")!.click();
    await vi.waitFor(() => {
      if (!root.querySelector("#survey-submit")) throw new Error("no survey yet");
    });

    for (const q of [1, 2, 3, 4]) {
      root.querySelector<HTMLInputElement>(`input[name="q${q}"][value="5"]`)!.click();
    }
    root.querySelector<HTMLButtonElement>("#survey-submit")!.click();
    await vi.waitFor(() => {
      if (!backend.calls.some((c) => c.path.endsWith("/survey"))) {
        throw new Error("survey not sent");
      }
    });
    const survey = backend.calls.find((c) => c.path.endsWith("/survey"))!.body as {
      answers: number[];
    };
    expect(survey.answers).toEqual([5, 5, 5, 5]);
    await vi.waitFor(() => {
      if (!root.textContent?.includes("All done")) throw new Error("not done yet");
    });
  });

  it("classroom mode mounts the classroom screen without a tracker", async () => {
    const backend = new MockBackend();
    const { root } = await bootToGame(backend, "classroom");
    expect(root.querySelector("#classroom-screen")).not.toBeNull();
    expect(root.querySelector("#tracker")).toBeNull();
    const create = backend.calls.find((c) => c.path === "/sessions")!;
    expect((create.body as { mode: string }).mode).toBe("classroom");
    expect((create.body as { hero_id: string | null }).hero_id).toBeNull();
  });
});
