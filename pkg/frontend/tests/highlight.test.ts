import { beforeEach, describe, expect, it } from "vitest";

import { renderRecommendations } from "../src/recommendations";
import { renderRules } from "../src/rules";
import { ViewState } from "../src/state";
import { Recommendation } from "../src/types";
import { recommendationsFixture, rulesFixture, tableFixture } from "./fixtures";

let rulesView: HTMLElement;
let recView: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = "<div id='rules'></div><div id='recs'></div>";
  rulesView = document.getElementById("rules") as HTMLElement;
  recView = document.getElementById("recs") as HTMLElement;
});

function highlightedIds(): Map<string, string> {
  const out = new Map<string, string>();
  for (const card of rulesView.querySelectorAll<HTMLElement>(".rule-card")) {
    if (card.dataset.match) {
      out.set(card.dataset.ruleId as string, card.dataset.match);
    }
  }
  return out;
}

describe("clicking Rules on a recommendation", () => {
  it("highlights exactly the applied rules with their match colors", () => {
    const state = new ViewState();
    const payload = rulesFixture();
    renderRules(rulesView, payload, state);
    expect(highlightedIds().size).toBe(0);

    renderRecommendations(recView, recommendationsFixture(), tableFixture(), (rec: Recommendation) => {
      state.activateRecommendation(rec);
      renderRules(rulesView, payload, state);
    });

    const button = recView.querySelector(
      "[data-rank='1'] .rules-button",
    ) as HTMLButtonElement;
    button.click();

    // filter narrowed to the recommendation's chart type
    expect(state.ruleFilter).toBe("line");
    const groups = [...rulesView.querySelectorAll<HTMLElement>(".rule-group")];
    expect(groups.map((g) => g.dataset.visType)).toEqual(["line"]);

    const highlighted = highlightedIds();
    expect(new Set(highlighted.keys())).toEqual(new Set(["rule-df-line", "rule-cf-line"]));
    const dfCard = rulesView.querySelector("[data-rule-id='rule-df-line']") as HTMLElement;
    const cfCard = rulesView.querySelector("[data-rule-id='rule-cf-line']") as HTMLElement;
    expect(dfCard.classList.contains("match-red")).toBe(true); // both axes
    expect(cfCard.classList.contains("match-green")).toBe(true); // x only
  });

  it("switching recommendations replaces the highlight set", () => {
    const state = new ViewState();
    const payload = rulesFixture();
    const recs = recommendationsFixture();
    renderRecommendations(recView, recs, tableFixture(), (rec) => {
      state.activateRecommendation(rec);
      renderRules(rulesView, payload, state);
    });
    (recView.querySelector("[data-rank='1'] .rules-button") as HTMLButtonElement).click();
    (recView.querySelector("[data-rank='2'] .rules-button") as HTMLButtonElement).click();

    expect(state.ruleFilter).toBe("histogram");
    const highlighted = highlightedIds();
    expect(new Set(highlighted.keys())).toEqual(new Set(["rule-df-histogram"]));
    const card = rulesView.querySelector("[data-rule-id='rule-df-histogram']") as HTMLElement;
    expect(card.classList.contains("match-orange")).toBe(true); // y only
  });

  it("chart renders the recommended mark types", () => {
    renderRecommendations(recView, recommendationsFixture(), tableFixture(), () => undefined);
    const lineCard = recView.querySelector("[data-rank='1']") as HTMLElement;
    expect(lineCard.querySelector("polyline.mark-line")).not.toBeNull();
    const histCard = recView.querySelector("[data-rank='2']") as HTMLElement;
    expect(histCard.querySelectorAll("rect.mark-bar").length).toBeGreaterThan(0);
  });
});
