import { clear, el } from "../dom.js";
import type { SessionView } from "../types.js";

export interface TurnHandlers {
  onSubmitText(text: string): void;
  onRecordPress(): void;
  onRecordRelease(): void;
}

/**
 * The adventure screen. Five fixed regions: scene backdrop on top, the
 * narration box bottom-middle with subtitles, the speaking NPC's portrait
 * bottom-left, the record button with a typed-input fallback, and the live
 * tracker panel on the right. Tracker rows are styled straight from the
 * served color; this file never derives colors from counts.
 */
export class GameScreen {
  private scene: HTMLElement;
  private introVideo: HTMLVideoElement;
  private dialogue: HTMLElement;
  private subtitle: HTMLElement;
  private portrait: HTMLElement;
  private tracker: HTMLElement;
  private controls: HTMLElement;
  private recordBtn: HTMLButtonElement;
  private textInput: HTMLInputElement;
  private sendBtn: HTMLButtonElement;
  private notice: HTMLElement;
  private popup: HTMLElement;
  private scrollback: HTMLElement;
  private lastTurn = -1;
  private lastNarrative = "";
  private textOnly = false;

  constructor(root: HTMLElement, private handlers: TurnHandlers) {
    clear(root);
    const screen = el("div", { id: "game-screen" });

    this.introVideo = el("video", { id: "intro-video" }) as HTMLVideoElement;
    this.introVideo.controls = true;
    this.scene = el("div", { id: "scene" }, [this.introVideo]);
    this.dialogue = el("div", { id: "dialogue" });
    this.subtitle = el("div", { className: "subtitle" });
    this.scrollback = el("div", { id: "transcript-log" });
    const dialogueBox = el("div", { id: "dialogue-box" }, [
      this.scrollback,
      this.dialogue,
      this.subtitle,
    ]);
    this.portrait = el("div", { id: "npc-portrait" });
    this.tracker = el("aside", { id: "tracker" });
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

    this.controls = el("div", { id: "controls" }, [
      this.recordBtn,
      this.textInput,
      this.sendBtn,
    ]);

    this.popup = el("div", { id: "reminder-popup" });
    this.popup.hidden = true;

    screen.append(
      this.scene,
      this.portrait,
      dialogueBox,
      this.controls,
      this.tracker,
      this.notice,
      this.popup,
    );
    root.appendChild(screen);
  }

  update(view: SessionView): void {
    if (view.scene) {
      this.scene.style.backgroundImage = `url(${view.scene.image_ref})`;
      this.scene.dataset.sceneId = view.scene.id;
    }
    // before the first turn the scene slot plays the intro video placeholder
    if (view.turn_index === 0 && view.intro_video_ref) {
      this.introVideo.src = view.intro_video_ref;
      this.introVideo.hidden = false;
    } else {
      this.introVideo.hidden = true;
    }
    if (view.turn_index > this.lastTurn && this.lastNarrative) {
      this.scrollback.appendChild(
        el("p", { className: "log-line gm", text: this.lastNarrative }),
      );
    }
    this.lastTurn = view.turn_index;
    this.lastNarrative = view.narrative;
    this.dialogue.textContent = view.narrative;
    this.subtitle.textContent = view.subtitle;

    clear(this.portrait);
    if (view.speaking_npc) {
      const img = el("img") as HTMLImageElement;
      img.src = view.speaking_npc.portrait_asset;
      img.alt = view.speaking_npc.name;
      this.portrait.append(img, el("span", { text: view.speaking_npc.name }));
    }

    clear(this.tracker);
    this.tracker.appendChild(el("h2", { text: "Practice Box" }));
    for (const row of view.practice_box) {
      const item = el("div", { className: `tracker-row color-${row.color}` });
      item.dataset.phrase = row.phrase_id;
      item.append(
        el("strong", { className: "tracker-phrase", text: row.phrase }),
        el("span", { className: "tracker-meaning", text: row.meaning }),
        el("span", { className: "tracker-count", text: `${row.count}×` }),
      );
      this.tracker.appendChild(item);
    }

    if (view.reminder && view.reminder.phrase_ids.length > 0) {
      this.showReminder(view);
    }
    if (view.status === "finished") {
      this.setBusy(true);
    }
  }

  private showReminder(view: SessionView): void {
    clear(this.popup);
    const byId = new Map(view.practice_box.map((row) => [row.phrase_id, row]));
    this.popup.appendChild(
      el("p", { text: "Psst — try to work these into your next replies:" }),
    );
    const list = el("ul");
    for (const pid of view.reminder!.phrase_ids) {
      const row = byId.get(pid);
      list.appendChild(
        el("li", { className: "reminder-phrase", text: row ? row.phrase : pid }),
      );
    }
    const dismiss = el("button", {
      id: "reminder-dismiss",
      text: "Got it",
    }) as HTMLButtonElement;
    dismiss.addEventListener("click", () => {
      this.popup.hidden = true;
    });
    this.popup.append(list, dismiss);
    this.popup.hidden = false;
  }

  /** Disable input while a turn is in flight (or after the final turn). */
  setBusy(busy: boolean): void {
    this.recordBtn.disabled = busy || this.textOnly;
    this.sendBtn.disabled = busy;
    this.textInput.disabled = busy;
  }

  setRecording(active: boolean): void {
    this.recordBtn.classList.toggle("recording", active);
    this.recordBtn.textContent = active ? "Release to send" : "Hold to speak";
  }

  /** Microphone denied or unavailable: typed input carries the session. */
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

  /** Scrollback entry for what the learner said (typed turns only). */
  addLearnerLine(text: string): void {
    this.scrollback.appendChild(
      el("p", { className: "log-line learner", text: `You: ${text}` }),
    );
  }

  get typedText(): string {
    return this.textInput.value.trim();
  }
}
