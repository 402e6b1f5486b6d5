import { beforeEach, describe, expect, it } from "vitest";

import { HIST_WIDTH, intervalToSpan, renderRules } from "../src/rules";
import { ViewState } from "../src/state";
import { VIS_TYPES } from "../src/types";
import { rulesFixture } from "./fixtures";

let container: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = "<div id='rules'></div>";
  container = document.getElementById("rules") as HTMLElement;
});

describe("renderRules", () => {
  it("renders exactly six chart-type groups in fixed order", () => {
    renderRules(container, rulesFixture(), new ViewState());
    const groups = [...container.querySelectorAll(".rule-group")];
    expect(groups).toHaveLength(6);
    expect(groups.map((g) => (g as HTMLElement).dataset.visType)).toEqual(VIS_TYPES);
  });

  it("interval cards shade exactly the payload interval", () => {
    renderRules(container, rulesFixture(), new ViewState());
    const card = container.querySelector("[data-rule-id='rule-df-line']") as HTMLElement;
    const shade = card.querySelector(".interval-shade") as SVGRectElement;
    expect(shade).not.toBeNull();
    // edges run 0.0 .. 3.0, interval [0.5, 2.3)
    const expected = intervalToSpan([0.5, 2.3], [0, 3], HIST_WIDTH);
    expect(Number(shade.getAttribute("x"))).toBeCloseTo(expected.x, 6);
    expect(Number(shade.getAttribute("width"))).toBeCloseTo(expected.width, 6);
    expect(shade.dataset.lo).toBe("0.5");
    expect(shade.dataset.hi).toBe("2.3");
  });

  it("categorical cards show text only, no histogram", () => {
    renderRules(container, rulesFixture(), new ViewState());
    const card = container.querySelector("[data-rule-id='rule-cf-bar']") as HTMLElement;
    expect(card.querySelector(".rule-histogram")).toBeNull();
    const description = card.querySelector(".rule-description") as HTMLElement;
    expect(description.textContent).toContain("sorted");
  });

  it("every card carries a confidence pie", () => {
    renderRules(container, rulesFixture(), new ViewState());
    const cards = [...container.querySelectorAll(".rule-card")];
    expect(cards.length).toBeGreaterThan(0);
    for (const card of cards) {
      expect(card.querySelector(".confidence-pie")).not.toBeNull();
    }
  });

  it("filter limits the view to one group", () => {
    const state = new ViewState();
    state.ruleFilter = "scatter";
    renderRules(container, rulesFixture(), state);
    const groups = [...container.querySelectorAll(".rule-group")];
    expect(groups).toHaveLength(1);
    expect((groups[0] as HTMLElement).dataset.visType).toBe("scatter");
  });

  it("renders an empty-state hint for empty groups", () => {
    const payload = rulesFixture();
    payload.groups.heatmap = [];
    renderRules(container, payload, new ViewState());
    const heatmapGroup = container.querySelector("[data-vis-type='heatmap']") as HTMLElement;
    expect(heatmapGroup.querySelector(".empty-hint")).not.toBeNull();
  });
});

describe("intervalToSpan", () => {
  it("clamps open ends to the histogram range", () => {
    const span = intervalToSpan([null, 1.5], [0, 3], 120);
    expect(span.x).toBe(0);
    expect(span.width).toBeCloseTo(60, 6);
    const upper = intervalToSpan([1.5, null], [0, 3], 120);
    expect(upper.x).toBeCloseTo(60, 6);
    expect(upper.width).toBeCloseTo(60, 6);
  });

  it("proportional to the interval width", () => {
    const span = intervalToSpan([0.75, 1.5], [0, 3], 120);
    expect(span.x).toBeCloseTo(30, 6);
    expect(span.width).toBeCloseTo(30, 6);
  });
});
