import { MatchTag, Recommendation, VisType } from "./types";

export type RuleFilter = VisType | "all";

/** Shared view state: the dataset being explored, the rules filter, and the
 *  highlights carried over from the active recommendation. */
export class ViewState {
  selectedDataset: string | null = null;
  ruleFilter: RuleFilter = "all";
  activeRecommendation: Recommendation | null = null;
  highlights = new Map<string, MatchTag>();

  /** Activating a recommendation filters the rules view to its chart type
   *  and highlights exactly its applied rules. */
  activateRecommendation(rec: Recommendation): void {
    this.activeRecommendation = rec;
    this.ruleFilter = rec.vis_type;
    this.highlights = new Map(rec.applied_rules.map((ar) => [ar.rule_id, ar.match]));
  }

  clearRecommendation(): void {
    this.activeRecommendation = null;
    this.highlights.clear();
  }

  highlightFor(ruleId: string): MatchTag {
    return this.highlights.get(ruleId) ?? "none";
  }
}
