import { clear, el } from "../dom.js";
import type { SessionView } from "../types.js";
import type { TurnHandlers } from "./game.js";

/**
 * The classroom screen: just the teacher's dialogue box and the reply
 * controls. No tracker panel, no scene backdrop — the layout stays fixed
 * for all twelve turns, and input locks after the outro.
 */
export class ClassroomScreen {
  private dialogue: HTMLElement;
  private hint: HTMLElement;
  private recordBtn: HTMLButtonElement;
  private textInput: HTMLInputElement;
  private sendBtn: HTMLButtonElement;
  private notice: HTMLElement;
  private scrollback: HTMLElement;
  private lastTurn = -1;
  private lastNarrative = "";
  private textOnly = false;

  constructor(root: HTMLElement, private handlers: TurnHandlers) {
    clear(root);
    const screen = el("div", { id: "classroom-screen" });
    this.dialogue = el("div", { id: "dialogue" });
    this.scrollback = el("div", { id: "transcript-log" });
    this.hint = el("p", { id: "turn-hint" });
    this.notice = el("p", { id: "notice" });
    this.notice.hidden = true;

    this.recordBtn = el("button", {
      id: "record-btn",
      text: "Hold to speak",
    }) as HTMLButtonElement;
    this.recordBtn.addEventListener("mousedown", () => this.handlers.onRecordPress());
    this.recordBtn.addEventListener("mouseup", () => this.handlers.onRecordRelease());

    this.textInput = el("input", { id: "text-fallback" }) as HTMLInputElement;
    this.textInput.placeholder = "…or type your reply";
    this.sendBtn = el("button", { id: "send-btn", text: "Send" }) as HTMLButtonElement;
    this.sendBtn.addEventListener("click", () => {
      const text = this.textInput.value.trim();
      if (text) this.handlers.onSubmitText(text);
    });

    screen.append(
      el("div", { id: "dialogue-box" }, [this.scrollback, this.dialogue]),
      this.hint,
      el("div", { id: "controls" }, [this.recordBtn, this.textInput, this.sendBtn]),
      this.notice,
    );
    root.appendChild(screen);
  }

  update(view: SessionView): void {
    if (view.turn_index > this.lastTurn && this.lastNarrative) {
      this.scrollback.appendChild(
        el("p", { className: "log-line gm", text: this.lastNarrative }),
      );
    }
    this.lastTurn = view.turn_index;
    this.lastNarrative = view.narrative;
    this.dialogue.textContent =
      view.narrative || "Say hello when you're ready to begin.";

    const prompt = view.prompt;
    if (!prompt) {
      this.hint.textContent = "";
    } else if (prompt.kind === "introduce_word" || prompt.kind === "feedback_on_sentence") {
      const row = view.practice_box.find((r) => r.phrase_id === prompt.phrase_id);
      this.hint.textContent =
        prompt.kind === "introduce_word"
          ? `Next up: '${row?.phrase ?? prompt.phrase_id}'`
          : `Your teacher is listening for '${row?.phrase ?? prompt.phrase_id}'`;
    } else {
      this.hint.textContent = "";
    }

    if (view.status === "finished") {
      this.setBusy(true);
      this.hint.textContent = "Session complete.";
    }
  }

  setBusy(busy: boolean): void {
    this.recordBtn.disabled = busy || this.textOnly;
    this.sendBtn.disabled = busy;
    this.textInput.disabled = busy;
  }

  setRecording(active: boolean): void {
    this.recordBtn.classList.toggle("recording", active);
    this.recordBtn.textContent = active ? "Release to send" : "Hold to speak";
  }

  fallbackToText(reason: string): void {
    this.textOnly = true;
    this.recordBtn.disabled = true;
    this.recordBtn.hidden = true;
    this.showNotice(`Microphone unavailable (${reason}). Type your replies instead.`);
  }

  showNotice(text: string): void {
    this.notice.textContent = text;
    this.notice.hidden = false;
  }

  clearNotice(): void {
    this.notice.hidden = true;
  }

  clearInput(): void {
    this.textInput.value = "";
  }

  addLearnerLine(text: string): void {
    this.scrollback.appendChild(
      el("p", { className: "log-line learner", text: `You: ${text}` }),
    );
  }

  get typedText(): string {
    return this.textInput.value.trim();
  }
}
