/**
 * Payload shapes served by the session API. The client renders these as-is:
 * colors, counts, turn indexes and scores are never recomputed locally.
 */

export type Mode = "rpg" | "classroom";

export interface PracticeBoxRow {
  phrase_id: string;
  phrase: string;
  meaning: string;
  example: string;
  count: number;
  color: "neutral" | "red" | "green";
}

export interface Reminder {
  turn_index: number;
  phrase_ids: string[];
}

export interface Outcome {
  ending_label: string;
  checkpoint_total: number;
  master_assessment: string;
}

export interface ClassroomPromptSpec {
  kind: "intro" | "introduce_word" | "feedback_on_sentence" | "outro";
  phrase_id: string | null;
}

export interface SessionView {
  session_id: string;
  mode: Mode;
  status: "active" | "finished";
  turn_index: number;
  narrative: string;
  subtitle: string;
  audio_ref: string | null;
  practice_box: PracticeBoxRow[];
  reminder: Reminder | null;
  outcome: Outcome | null;
  // rpg only
  phase?: number;
  location?: string;
  hero_id?: string;
  party?: string[];
  intro_video_ref?: string;
  scene?: { id: string; image_ref: string };
  speaking_npc?: { id: string; name: string; portrait_asset: string } | null;
  // classroom only
  prompt?: ClassroomPromptSpec | null;
}

export interface PhraseInfo {
  id: string;
  canonical: string;
  meaning: string;
  example: string;
}

export interface HeroInfo {
  id: string;
  name: string;
  description: string;
  portrait_asset: string;
}

export interface AppConfig {
  inventory: PhraseInfo[];
  heroes: HeroInfo[];
  intro_video_ref: string;
}

export type FamiliarityLevel =
  | "completely_unfamiliar"
  | "somewhat_familiar"
  | "can_guess";

export interface PretestItem {
  phrase_id: string;
  level: FamiliarityLevel;
  definition?: string;
  sentence?: string;
}

export interface AssessmentResult {
  definition_total: number;
  sentence_total: number;
  items: Array<Record<string, unknown>>;
}

export interface PosttestItemResult {
  phrase_id: string;
  definition_score: number;
  sentence_score: number;
  feedback: string;
}

export interface FeedbackReport {
  general: Record<string, number>;
  specific: Array<{
    sentence: string;
    correction: string;
    explanation: string;
    category: string;
  }>;
  formative: Array<{
    phrase_id: string;
    used: boolean;
    count: number;
    correctness: string;
    appropriateness: string;
    revised_example: string | null;
  }>;
}
