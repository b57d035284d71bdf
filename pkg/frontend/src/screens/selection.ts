import { clear, el } from "../dom.js";
import type {
  AppConfig,
  FamiliarityLevel,
  Mode,
  PretestItem,
} from "../types.js";

export interface SelectionResult {
  practice: string[];
  pretest: PretestItem[];
  mode: Mode;
  heroId?: string;
}

const REQUIRED_PICKS = 5;

const LEVELS: Array<{ value: FamiliarityLevel; label: string }> = [
  { value: "completely_unfamiliar", label: "Completely unfamiliar" },
  { value: "somewhat_familiar", label: "Somewhat familiar" },
  { value: "can_guess", label: "I can guess the meaning" },
];

/**
 * Three-step intake: pick exactly five of the twelve phrases, rate
 * familiarity for each (partial knowledge opens definition + sentence
 * inputs), then choose the activity (hero adventure or classroom).
 */
export class SelectionScreen {
  private picked = new Set<string>();
  private levels = new Map<string, FamiliarityLevel>();
  private elicitations = new Map<string, { definition: string; sentence: string }>();

  constructor(
    private root: HTMLElement,
    private config: AppConfig,
    private onDone: (result: SelectionResult) => void,
  ) {
    this.renderPickStep();
  }

  private renderPickStep(): void {
    clear(this.root);
    const screen = el("div", { id: "selection-screen" });
    screen.appendChild(
      el("h1", { text: `Pick ${REQUIRED_PICKS} expressions you want to practice` }),
    );
    const counter = el("p", { id: "pick-counter" });
    const grid = el("div", { id: "phrase-grid" });
    const next = el("button", {
      id: "continue-btn",
      text: "Continue",
    }) as HTMLButtonElement;

    const sync = () => {
      counter.textContent = `${this.picked.size} of ${REQUIRED_PICKS} selected`;
      next.disabled = this.picked.size !== REQUIRED_PICKS;
    };

    for (const phrase of this.config.inventory) {
      const card = el("label", { className: "phrase-card" });
      const box = el("input") as HTMLInputElement;
      box.type = "checkbox";
      box.value = phrase.id;
      box.addEventListener("change", () => {
        if (box.checked) this.picked.add(phrase.id);
        else this.picked.delete(phrase.id);
        sync();
      });
      card.appendChild(box);
      card.appendChild(el("span", { className: "phrase-text", text: phrase.canonical }));
      grid.appendChild(card);
    }
    next.addEventListener("click", () => this.renderFamiliarityStep());

    sync();
    screen.append(counter, grid, next);
    this.root.appendChild(screen);
  }

  private renderFamiliarityStep(): void {
    clear(this.root);
    const screen = el("div", { id: "familiarity-screen" });
    screen.appendChild(el("h1", { text: "How well do you know each one?" }));
    const next = el("button", {
      id: "familiarity-continue-btn",
      text: "Continue",
    }) as HTMLButtonElement;

    const sync = () => {
      next.disabled = ![...this.picked].every((pid) => this.levels.has(pid));
    };

    for (const pid of this.picked) {
      const phrase = this.config.inventory.find((p) => p.id === pid)!;
      const block = el("fieldset", { className: "familiarity-block" });
      block.dataset.phrase = pid;
      block.appendChild(el("legend", { text: phrase.canonical }));

      const elicitation = el("div", { className: "elicitation" });
      elicitation.hidden = true;
      const definition = el("textarea", {
        className: "elicit-definition",
      }) as HTMLTextAreaElement;
      definition.placeholder = "What do you think it means?";
      const sentence = el("textarea", {
        className: "elicit-sentence",
      }) as HTMLTextAreaElement;
      sentence.placeholder = "Try it in a sentence";
      const record = () =>
        this.elicitations.set(pid, {
          definition: definition.value,
          sentence: sentence.value,
        });
      definition.addEventListener("input", record);
      sentence.addEventListener("input", record);
      elicitation.append(
        el("p", { text: "Since you partly know it, tell us more:" }),
        definition,
        sentence,
      );

      for (const level of LEVELS) {
        const option = el("label", { className: "level-option" });
        const radio = el("input") as HTMLInputElement;
        radio.type = "radio";
        radio.name = `level-${pid}`;
        radio.value = level.value;
        radio.addEventListener("change", () => {
          this.levels.set(pid, level.value);
          const partial = level.value !== "completely_unfamiliar";
          elicitation.hidden = !partial;
          if (!partial) this.elicitations.delete(pid);
          sync();
        });
        option.append(radio, el("span", { text: level.label }));
        block.appendChild(option);
      }
      block.appendChild(elicitation);
      screen.appendChild(block);
    }

    next.addEventListener("click", () => this.renderModeStep());
    sync();
    screen.appendChild(next);
    this.root.appendChild(screen);
  }

  private renderModeStep(): void {
    clear(this.root);
    const screen = el("div", { id: "mode-screen" });
    screen.appendChild(el("h1", { text: "Choose your activity" }));

    let mode: Mode = "rpg";
    let heroId = this.config.heroes[0]?.id;

    const heroRow = el("div", { id: "hero-row" });
    for (const hero of this.config.heroes) {
      const card = el("label", { className: "hero-card" });
      const radio = el("input") as HTMLInputElement;
      radio.type = "radio";
      radio.name = "hero";
      radio.value = hero.id;
      radio.checked = hero.id === heroId;
      radio.addEventListener("change", () => {
        heroId = hero.id;
      });
      card.append(
        radio,
        el("strong", { text: hero.name }),
        el("p", { text: hero.description }),
      );
      heroRow.appendChild(card);
    }

    const modeRow = el("div", { id: "mode-row" });
    for (const [value, label] of [
      ["rpg", "Adventure with a game master"],
      ["classroom", "AI classroom"],
    ] as Array<[Mode, string]>) {
      const option = el("label", { className: "mode-option" });
      const radio = el("input") as HTMLInputElement;
      radio.type = "radio";
      radio.name = "mode";
      radio.value = value;
      radio.checked = value === "rpg";
      radio.addEventListener("change", () => {
        mode = value;
        heroRow.hidden = value !== "rpg";
      });
      option.append(radio, el("span", { text: label }));
      modeRow.appendChild(option);
    }

    const begin = el("button", { id: "begin-btn", text: "Begin" }) as HTMLButtonElement;
    begin.addEventListener("click", () => {
      const pretest: PretestItem[] = [...this.picked].map((pid) => {
        const level = this.levels.get(pid)!;
        const item: PretestItem = { phrase_id: pid, level };
        if (level !== "completely_unfamiliar") {
          const texts = this.elicitations.get(pid) ?? { definition: "", sentence: "" };
          item.definition = texts.definition;
          item.sentence = texts.sentence;
        }
        return item;
      });
      this.onDone({
        practice: [...this.picked],
        pretest,
        mode,
        heroId: mode === "rpg" ? heroId : undefined,
      });
    });

    screen.append(modeRow, heroRow, begin);
    this.root.appendChild(screen);
  }
}
