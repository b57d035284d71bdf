import { ApiClient, ApiError } from "./api.js";
import { MicUnavailable, PressToRecord, blobToBase64 } from "./recorder.js";
import { ClassroomScreen } from "./screens/classroom.js";
import { GameScreen } from "./screens/game.js";
import { SelectionScreen, type SelectionResult } from "./screens/selection.js";
import { WrapupScreen } from "./screens/wrapup.js";
import type { AppConfig, PhraseInfo, SessionView } from "./types.js";

/**
 * Drives the whole learner journey: intake, the twelve-turn session, then
 * feedback, post-test, and survey. All learning state lives on the server;
 * this controller only forwards input and renders whatever view comes back.
 * One request may be in flight per session — input is disabled while it is,
 * and a Busy reply from the server re-enables input with a notice.
 */
export class SessionFlow {
  private sessionId = "";
  private practice: PhraseInfo[] = [];
  private screen: GameScreen | ClassroomScreen | null = null;
  private recorder = new PressToRecord();
  private recording = false;
  private inFlight = false;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
  ) {}

  async boot(): Promise<void> {
    const config = await this.api.getConfig();
    new SelectionScreen(this.root, config, (result) =>
      void this.startSession(config, result),
    );
  }

  private async startSession(config: AppConfig, result: SelectionResult): Promise<void> {
    const view = await this.api.createSession(result.mode, result.practice, result.heroId);
    this.sessionId = view.session_id;
    this.practice = config.inventory.filter((p) => result.practice.includes(p.id));
    await this.api.submitPretest(this.sessionId, result.pretest);

    const handlers = {
      onSubmitText: (text: string) => void this.submitText(text),
      onRecordPress: () => void this.recordPress(),
      onRecordRelease: () => void this.recordRelease(),
    };
    this.screen =
      view.mode === "rpg"
        ? new GameScreen(this.root, handlers)
        : new ClassroomScreen(this.root, handlers);
    this.screen.update(view);
  }

  private async submitText(text: string): Promise<void> {
    await this.runTurn(() => this.api.submitTextTurn(this.sessionId, text), text);
  }

  private async recordPress(): Promise<void> {
    if (this.inFlight || this.recording) return;
    try {
      await this.recorder.start();
      this.recording = true;
      this.screen?.setRecording(true);
    } catch (err) {
      if (err instanceof MicUnavailable) {
        this.screen?.fallbackToText(err.message);
        return;
      }
      throw err;
    }
  }

  private async recordRelease(): Promise<void> {
    if (!this.recording) return;
    this.recording = false;
    this.screen?.setRecording(false);
    const blob = await this.recorder.stop();
    const dataB64 = await blobToBase64(blob);
    // Stub-mode deployments transcribe via sidecar text; if the learner
    // typed anything, send it along as the sidecar.
    const sidecar = this.screen?.typedText || undefined;
    await this.runTurn(() =>
      this.api.submitAudioTurn(this.sessionId, dataB64, sidecar),
    );
  }

  private async runTurn(
    call: () => Promise<SessionView>,
    learnerText?: string,
  ): Promise<void> {
    if (this.inFlight || !this.screen) return;
    this.inFlight = true;
    this.screen.setBusy(true);
    this.screen.clearNotice();
    try {
      const view = await call();
      if (learnerText) this.screen.addLearnerLine(learnerText);
      this.screen.clearInput();
      this.screen.update(view);
      if (view.status === "finished") {
        await this.startWrapup();
        return;
      }
    } catch (err) {
      if (err instanceof ApiError && err.busy) {
        this.screen.showNotice("Still working on your last turn — try again in a moment.");
      } else if (err instanceof ApiError) {
        this.screen.showNotice(`That didn't go through (${err.code}). Try again.`);
      } else {
        throw err;
      }
    } finally {
      this.inFlight = false;
      if (this.screen) this.screen.setBusy(false);
    }
  }

  private async startWrapup(): Promise<void> {
    const report = await this.api.getFeedback(this.sessionId);
    const wrapup = new WrapupScreen(this.root, this.practice, {
      onPosttestSubmit: (responses) =>
        void this.api
          .submitPosttest(this.sessionId, responses)
          .then((result) =>
            wrapup.showPosttestResults(
              result.items as unknown as Array<{
                phrase_id: string;
                definition_score: number;
                sentence_score: number;
                feedback: string;
              }>,
            ),
          )
          .catch((err: unknown) => {
            if (err instanceof ApiError) {
              alert(`Post-test rejected: ${err.message}`);
            } else {
              throw err;
            }
          }),
      onSurveySubmit: (answers) =>
        void this.api.submitSurvey(this.sessionId, answers).then(() => wrapup.showDone()),
    });
    wrapup.showFeedback(report);
  }
}
