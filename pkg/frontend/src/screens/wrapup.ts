import { clear, el } from "../dom.js";
import type {
  FeedbackReport,
  PhraseInfo,
  PosttestItemResult,
} from "../types.js";

export const SURVEY_QUESTIONS = [
  "I was engaged during the activity.",
  "The examples and contexts helped me understand the vocabulary.",
  "I had enough opportunity to use the vocabulary.",
  "The way the AI mentor/Game Master used the target words helped me understand them.",
];

export interface WrapupHandlers {
  onPosttestSubmit(
    responses: Array<{ phrase_id: string; definition: string; sentence: string }>,
  ): void;
  onSurveySubmit(answers: number[]): void;
}

/**
 * Post-session flow in one screen, three stages: the feedback report, the
 * define-and-use form for all five phrases, then the four-question survey.
 */
export class WrapupScreen {
  private feedbackSection: HTMLElement;
  private posttestSection: HTMLElement;
  private surveySection: HTMLElement;

  constructor(
    root: HTMLElement,
    private phrases: PhraseInfo[],
    private handlers: WrapupHandlers,
  ) {
    clear(root);
    const screen = el("div", { id: "wrapup-screen" });
    this.feedbackSection = el("section", { id: "feedback-section" });
    this.posttestSection = el("section", { id: "posttest-section" });
    this.surveySection = el("section", { id: "survey-section" });
    this.surveySection.hidden = true;
    screen.append(this.feedbackSection, this.posttestSection, this.surveySection);
    root.appendChild(screen);
  }

  showFeedback(report: FeedbackReport): void {
    clear(this.feedbackSection);
    this.feedbackSection.appendChild(el("h1", { text: "How it went" }));

    const general = el("div", { id: "general-feedback" });
    general.appendChild(el("h2", { text: "Overall" }));
    for (const [category, count] of Object.entries(report.general)) {
      general.appendChild(
        el("span", { className: "general-count", text: `${category}: ${count}` }),
      );
    }

    const specific = el("div", { id: "specific-feedback" });
    specific.appendChild(el("h2", { text: "Sentence notes" }));
    if (report.specific.length === 0) {
      specific.appendChild(el("p", { text: "No corrections this time." }));
    }
    for (const entry of report.specific) {
      specific.appendChild(
        el("p", {
          className: "specific-entry",
          text: `"${entry.sentence}" → "${entry.correction}" (${entry.explanation})`,
        }),
      );
    }

    const formative = el("div", { id: "formative-feedback" });
    formative.appendChild(el("h2", { text: "Your five phrases" }));
    const byId = new Map(this.phrases.map((p) => [p.id, p]));
    for (const entry of report.formative) {
      const row = el("div", { className: "formative-row" });
      row.dataset.phrase = entry.phrase_id;
      const badge = el("span", {
        className: `usage-badge ${entry.used ? "used" : "unused"}`,
        text: entry.used ? `used ${entry.count}×` : "not used",
      });
      row.append(
        el("strong", { text: byId.get(entry.phrase_id)?.canonical ?? entry.phrase_id }),
        badge,
        el("span", { text: `${entry.correctness}; ${entry.appropriateness}` }),
      );
      if (entry.revised_example) {
        row.appendChild(
          el("p", { className: "revised-example", text: `Try: ${entry.revised_example}` }),
        );
      }
      formative.appendChild(row);
    }

    this.feedbackSection.append(general, specific, formative);
    this.renderPosttestForm();
  }

  private renderPosttestForm(): void {
    clear(this.posttestSection);
    this.posttestSection.appendChild(el("h1", { text: "One last check" }));
    const fields = new Map<string, { definition: HTMLInputElement; sentence: HTMLInputElement }>();
    for (const phrase of this.phrases) {
      const block = el("fieldset", { className: "posttest-block" });
      block.dataset.phrase = phrase.id;
      block.appendChild(el("legend", { text: phrase.canonical }));
      const definition = el("input", { className: "posttest-definition" }) as HTMLInputElement;
      definition.placeholder = "What does it mean?";
      const sentence = el("input", { className: "posttest-sentence" }) as HTMLInputElement;
      sentence.placeholder = "Use it in a sentence";
      fields.set(phrase.id, { definition, sentence });
      block.append(definition, sentence);
      this.posttestSection.appendChild(block);
    }
    const submit = el("button", {
      id: "posttest-submit",
      text: "Submit answers",
    }) as HTMLButtonElement;
    submit.addEventListener("click", () => {
      this.handlers.onPosttestSubmit(
        this.phrases.map((phrase) => ({
          phrase_id: phrase.id,
          definition: fields.get(phrase.id)!.definition.value,
          sentence: fields.get(phrase.id)!.sentence.value,
        })),
      );
    });
    this.posttestSection.appendChild(submit);
  }

  showPosttestResults(items: PosttestItemResult[]): void {
    clear(this.posttestSection);
    this.posttestSection.appendChild(el("h1", { text: "Your results" }));
    const byId = new Map(this.phrases.map((p) => [p.id, p]));
    for (const item of items) {
      const row = el("div", { className: "posttest-result" });
      row.dataset.phrase = item.phrase_id;
      row.append(
        el("strong", { text: byId.get(item.phrase_id)?.canonical ?? item.phrase_id }),
        el("span", { className: "item-feedback", text: item.feedback }),
      );
      this.posttestSection.appendChild(row);
    }
    this.renderSurvey();
  }

  private renderSurvey(): void {
    clear(this.surveySection);
    this.surveySection.hidden = false;
    this.surveySection.appendChild(el("h1", { text: "Quick survey" }));
    const answers = new Map<number, number>();
    const submit = el("button", {
      id: "survey-submit",
      text: "Finish",
    }) as HTMLButtonElement;
    submit.disabled = true;

    SURVEY_QUESTIONS.forEach((question, index) => {
      const block = el("fieldset", { className: "survey-question" });
      block.appendChild(el("legend", { text: question }));
      for (let value = 1; value <= 5; value++) {
        const option = el("label", { className: "survey-option" });
        const radio = el("input") as HTMLInputElement;
        radio.type = "radio";
        radio.name = `q${index + 1}`;
        radio.value = String(value);
        radio.addEventListener("change", () => {
          answers.set(index, value);
          submit.disabled = answers.size !== SURVEY_QUESTIONS.length;
        });
        option.append(radio, el("span", { text: String(value) }));
        block.appendChild(option);
      }
      this.surveySection.appendChild(block);
    });
    this.surveySection.appendChild(
      el("p", { text: "1 = strongly disagree … 5 = strongly agree" }),
    );
    submit.addEventListener("click", () => {
      this.handlers.onSurveySubmit(
        SURVEY_QUESTIONS.map((_, index) => answers.get(index)!),
      );
    });
    this.surveySection.appendChild(submit);
  }

  showDone(): void {
    clear(this.surveySection);
    this.surveySection.appendChild(el("h1", { text: "All done — thanks for playing!" }));
  }
}
