import { applyBorder } from "./borders";
import { ViewState } from "./state";
import { Histogram, RuleCard, RulesPayload, VIS_TYPES } from "./types";

export const HIST_WIDTH = 140;
export const HIST_HEIGHT = 44;
export const PIE_RADIUS = 18;

const SVG_NS = "http://www.w3.org/2000/svg";

/** Pixel span of a rule interval over the histogram range; open ends clamp
 *  to the winsorized edges. */
export function intervalToSpan(
  interval: [number | null, number | null],
  edges: number[],
  width: number,
): { x: number; width: number } {
  const min = edges[0];
  const max = edges[edges.length - 1];
  const range = max - min || 1;
  const lo = interval[0] === null ? min : Math.max(min, interval[0]);
  const hi = interval[1] === null ? max : Math.min(max, interval[1]);
  const x = ((lo - min) / range) * width;
  return { x, width: Math.max(0, ((hi - lo) / range) * width) };
}

function svgEl<K extends keyof SVGElementTagNameMap>(tag: K): SVGElementTagNameMap[K] {
  return document.createElementNS(SVG_NS, tag);
}

function renderHistogram(hist: Histogram, interval: [number | null, number | null]): SVGSVGElement {
  const svg = svgEl("svg");
  svg.setAttribute("width", String(HIST_WIDTH));
  svg.setAttribute("height", String(HIST_HEIGHT));
  svg.setAttribute("class", "rule-histogram");
  const maxCount = Math.max(1, ...hist.counts);
  const binWidth = HIST_WIDTH / hist.counts.length;
  hist.counts.forEach((count, i) => {
    const bar = svgEl("rect");
    const h = (count / maxCount) * (HIST_HEIGHT - 4);
    bar.setAttribute("class", "hist-bar");
    bar.setAttribute("x", String(i * binWidth));
    bar.setAttribute("y", String(HIST_HEIGHT - h));
    bar.setAttribute("width", String(Math.max(1, binWidth - 1)));
    bar.setAttribute("height", String(h));
    svg.appendChild(bar);
  });
  const span = intervalToSpan(interval, hist.edges, HIST_WIDTH);
  const shade = svgEl("rect");
  shade.setAttribute("class", "interval-shade");
  shade.setAttribute("x", String(span.x));
  shade.setAttribute("y", "0");
  shade.setAttribute("width", String(span.width));
  shade.setAttribute("height", String(HIST_HEIGHT));
  shade.dataset.lo = String(interval[0]);
  shade.dataset.hi = String(interval[1]);
  svg.appendChild(shade);
  return svg;
}

/** Pie chart showing the rule's confidence in its own design choice. */
function renderConfidencePie(value: number): SVGSVGElement {
  const svg = svgEl("svg");
  const size = PIE_RADIUS * 2 + 4;
  svg.setAttribute("width", String(size));
  svg.setAttribute("height", String(size));
  svg.setAttribute("class", "confidence-pie");
  const cx = size / 2;
  const cy = size / 2;
  const bg = svgEl("circle");
  bg.setAttribute("cx", String(cx));
  bg.setAttribute("cy", String(cy));
  bg.setAttribute("r", String(PIE_RADIUS));
  bg.setAttribute("class", "pie-bg");
  svg.appendChild(bg);

  const frac = Math.min(1, Math.max(0, value));
  if (frac >= 1) {
    const full = svgEl("circle");
    full.setAttribute("cx", String(cx));
    full.setAttribute("cy", String(cy));
    full.setAttribute("r", String(PIE_RADIUS));
    full.setAttribute("class", "pie-arc");
    full.dataset.value = String(value);
    svg.appendChild(full);
  } else if (frac > 0) {
    const angle = frac * 2 * Math.PI;
    const x = cx + PIE_RADIUS * Math.sin(angle);
    const y = cy - PIE_RADIUS * Math.cos(angle);
    const largeArc = angle > Math.PI ? 1 : 0;
    const path = svgEl("path");
    path.setAttribute(
      "d",
      `M ${cx} ${cy} L ${cx} ${cy - PIE_RADIUS} A ${PIE_RADIUS} ${PIE_RADIUS} 0 ${largeArc} 1 ${x} ${y} Z`,
    );
    path.setAttribute("class", "pie-arc");
    path.dataset.value = String(value);
    svg.appendChild(path);
  }
  const label = svgEl("text");
  label.setAttribute("x", String(cx));
  label.setAttribute("y", String(size - 1));
  label.setAttribute("class", "pie-label");
  label.textContent = `${Math.round(frac * 100)}%`;
  svg.appendChild(label);
  return svg;
}

function renderCard(rule: RuleCard, state: ViewState): HTMLElement {
  const card = document.createElement("div");
  card.className = "rule-card";
  card.dataset.ruleId = rule.rule_id;

  const text = document.createElement("div");
  text.className = "rule-text";
  text.textContent = rule.semantic_text;
  card.appendChild(text);

  const center = document.createElement("div");
  center.className = "rule-center";
  if (rule.kind === "interval" && rule.payload.histogram && rule.payload.interval) {
    center.appendChild(renderHistogram(rule.payload.histogram, rule.payload.interval));
  } else {
    const desc = document.createElement("div");
    desc.className = "rule-description";
    desc.textContent = rule.payload.description ?? rule.semantic_text;
    center.appendChild(desc);
  }
  card.appendChild(center);

  const confidence = rule.confidence[rule.choice] ?? 0;
  card.appendChild(renderConfidencePie(confidence));

  applyBorder(card, state.highlightFor(rule.rule_id));
  return card;
}

/** Rules View: one box per chart type, cards inside. */
export function renderRules(container: HTMLElement, payload: RulesPayload, state: ViewState): void {
  container.textContent = "";
  for (const visType of VIS_TYPES) {
    if (state.ruleFilter !== "all" && state.ruleFilter !== visType) {
      continue;
    }
    const box = document.createElement("section");
    box.className = "rule-group";
    box.dataset.visType = visType;
    const title = document.createElement("h3");
    title.textContent = visType;
    box.appendChild(title);
    const rules = payload.groups[visType] ?? [];
    if (rules.length === 0) {
      const empty = document.createElement("p");
      empty.className = "empty-hint";
      empty.textContent = "no rules for this chart type";
      box.appendChild(empty);
    }
    for (const rule of rules) {
      box.appendChild(renderCard(rule, state));
    }
    container.appendChild(box);
  }
}
