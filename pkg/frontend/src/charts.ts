import { Encoding, TableView, VisType } from "./types";

export const CHART_WIDTH = 340;
export const CHART_HEIGHT = 220;
const MARGIN = 28;

const SVG_NS = "http://www.w3.org/2000/svg";

type Cell = string | number | null;

function svgEl<K extends keyof SVGElementTagNameMap>(tag: K): SVGElementTagNameMap[K] {
  return document.createElementNS(SVG_NS, tag);
}

function columnValues(table: TableView, index: number): Cell[] {
  return table.rows.map((row) => row[index] ?? null);
}

/** Numeric view of a column: numbers pass through, anything else falls back
 *  to the row index (keeps datetimes and categories plottable). */
function asNumbers(values: Cell[]): number[] {
  return values.map((v, i) => {
    if (typeof v === "number") return v;
    if (typeof v === "string") {
      const parsed = Date.parse(v);
      if (!Number.isNaN(parsed)) return parsed;
      const num = Number(v);
      if (!Number.isNaN(num)) return num;
    }
    return i;
  });
}

function extent(values: number[]): [number, number] {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  return hi > lo ? [lo, hi] : [lo - 1, hi + 1];
}

function scale(domain: [number, number], range: [number, number]) {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  return (v: number) => r0 + ((v - d0) / (d1 - d0)) * (r1 - r0);
}

function frame(): SVGSVGElement {
  const svg = svgEl("svg");
  svg.setAttribute("width", String(CHART_WIDTH));
  svg.setAttribute("height", String(CHART_HEIGHT));
  svg.setAttribute("class", "chart");
  const axes = svgEl("path");
  axes.setAttribute(
    "d",
    `M ${MARGIN} ${MARGIN} L ${MARGIN} ${CHART_HEIGHT - MARGIN} L ${CHART_WIDTH - MARGIN} ${CHART_HEIGHT - MARGIN}`,
  );
  axes.setAttribute("class", "axes");
  svg.appendChild(axes);
  return svg;
}

function plotArea(): { x: [number, number]; y: [number, number] } {
  return {
    x: [MARGIN, CHART_WIDTH - MARGIN],
    y: [CHART_HEIGHT - MARGIN, MARGIN],
  };
}

function quartiles(sorted: number[]): [number, number, number] {
  const q = (p: number) => {
    const pos = p * (sorted.length - 1);
    const lo = Math.floor(pos);
    const hi = Math.ceil(pos);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo);
  };
  return [q(0.25), q(0.5), q(0.75)];
}

function pickAxis(encodings: Encoding[], axis: "x" | "y"): number[] {
  return encodings.filter((e) => e.axis === axis).map((e) => e.column);
}

function renderLine(svg: SVGSVGElement, xs: number[], ys: number[]): void {
  const area = plotArea();
  const sx = scale(extent(xs), area.x);
  const sy = scale(extent(ys), area.y);
  const order = xs.map((_, i) => i).sort((a, b) => xs[a] - xs[b]);
  const points = order.map((i) => `${sx(xs[i])},${sy(ys[i])}`).join(" ");
  const line = svgEl("polyline");
  line.setAttribute("points", points);
  line.setAttribute("class", "mark-line");
  svg.appendChild(line);
}

function renderScatter(svg: SVGSVGElement, xs: number[], ys: number[]): void {
  const area = plotArea();
  const sx = scale(extent(xs), area.x);
  const sy = scale(extent(ys), area.y);
  xs.forEach((x, i) => {
    const dot = svgEl("circle");
    dot.setAttribute("cx", String(sx(x)));
    dot.setAttribute("cy", String(sy(ys[i])));
    dot.setAttribute("r", "2.5");
    dot.setAttribute("class", "mark-point");
    svg.appendChild(dot);
  });
}

function renderBar(svg: SVGSVGElement, labels: Cell[], ys: number[]): void {
  const area = plotArea();
  const sy = scale([Math.min(0, ...ys), Math.max(...ys)], area.y);
  const band = (area.x[1] - area.x[0]) / ys.length;
  ys.forEach((v, i) => {
    const bar = svgEl("rect");
    bar.setAttribute("x", String(area.x[0] + i * band + 1));
    bar.setAttribute("y", String(Math.min(sy(v), sy(0))));
    bar.setAttribute("width", String(Math.max(1, band - 2)));
    bar.setAttribute("height", String(Math.abs(sy(0) - sy(v))));
    bar.setAttribute("class", "mark-bar");
    const label = labels[i];
    if (label !== null) bar.dataset.label = String(label);
    svg.appendChild(bar);
  });
}

function renderHistogram(svg: SVGSVGElement, values: number[]): void {
  const area = plotArea();
  const [lo, hi] = extent(values);
  const bins = new Array(10).fill(0);
  for (const v of values) {
    const b = Math.min(bins.length - 1, Math.floor(((v - lo) / (hi - lo)) * bins.length));
    bins[b] += 1;
  }
  const sy = scale([0, Math.max(...bins)], area.y);
  const band = (area.x[1] - area.x[0]) / bins.length;
  bins.forEach((count, i) => {
    const bar = svgEl("rect");
    bar.setAttribute("x", String(area.x[0] + i * band + 1));
    bar.setAttribute("y", String(sy(count)));
    bar.setAttribute("width", String(Math.max(1, band - 2)));
    bar.setAttribute("height", String(area.y[0] - sy(count)));
    bar.setAttribute("class", "mark-bar");
    svg.appendChild(bar);
  });
}

function renderBox(svg: SVGSVGElement, columns: number[][]): void {
  const area = plotArea();
  const all = columns.flat();
  const sy = scale(extent(all), area.y);
  const band = (area.x[1] - area.x[0]) / columns.length;
  columns.forEach((values, i) => {
    const sorted = [...values].sort((a, b) => a - b);
    const [q1, median, q3] = quartiles(sorted);
    const cx = area.x[0] + band * (i + 0.5);
    const half = Math.min(26, band * 0.3);
    const group = svgEl("g");
    group.setAttribute("class", "mark-box");
    const whisker = svgEl("line");
    whisker.setAttribute("x1", String(cx));
    whisker.setAttribute("x2", String(cx));
    whisker.setAttribute("y1", String(sy(sorted[0])));
    whisker.setAttribute("y2", String(sy(sorted[sorted.length - 1])));
    group.appendChild(whisker);
    const box = svgEl("rect");
    box.setAttribute("x", String(cx - half));
    box.setAttribute("y", String(sy(q3)));
    box.setAttribute("width", String(half * 2));
    box.setAttribute("height", String(Math.max(1, sy(q1) - sy(q3))));
    group.appendChild(box);
    const med = svgEl("line");
    med.setAttribute("x1", String(cx - half));
    med.setAttribute("x2", String(cx + half));
    med.setAttribute("y1", String(sy(median)));
    med.setAttribute("y2", String(sy(median)));
    group.appendChild(med);
    svg.appendChild(group);
  });
}

function renderHeatmap(svg: SVGSVGElement, xs: number[], ys: number[]): void {
  const area = plotArea();
  const grid = 8;
  const counts = Array.from({ length: grid }, () => new Array(grid).fill(0));
  const [xlo, xhi] = extent(xs);
  const [ylo, yhi] = extent(ys);
  xs.forEach((x, i) => {
    const gx = Math.min(grid - 1, Math.floor(((x - xlo) / (xhi - xlo)) * grid));
    const gy = Math.min(grid - 1, Math.floor(((ys[i] - ylo) / (yhi - ylo)) * grid));
    counts[gx][gy] += 1;
  });
  const maxCount = Math.max(1, ...counts.flat());
  const cw = (area.x[1] - area.x[0]) / grid;
  const ch = (area.y[0] - area.y[1]) / grid;
  for (let gx = 0; gx < grid; gx += 1) {
    for (let gy = 0; gy < grid; gy += 1) {
      const cell = svgEl("rect");
      cell.setAttribute("x", String(area.x[0] + gx * cw));
      cell.setAttribute("y", String(area.y[0] - (gy + 1) * ch));
      cell.setAttribute("width", String(cw));
      cell.setAttribute("height", String(ch));
      cell.setAttribute("class", "mark-cell");
      cell.setAttribute("fill-opacity", String(counts[gx][gy] / maxCount));
      svg.appendChild(cell);
    }
  }
}

/** Render one recommended chart from its declarative pieces. Unknown mark
 *  types fall back to a plain table with a warning. */
export function renderChart(
  container: HTMLElement,
  visType: VisType,
  encodings: Encoding[],
  table: TableView,
): void {
  container.textContent = "";
  const xCols = pickAxis(encodings, "x");
  const yCols = pickAxis(encodings, "y");
  const first = encodings.length ? encodings[0].column : 0;
  const svg = frame();
  switch (visType) {
    case "line": {
      const x = asNumbers(columnValues(table, xCols[0] ?? first));
      const y = asNumbers(columnValues(table, yCols[0] ?? first));
      renderLine(svg, x, y);
      break;
    }
    case "scatter": {
      const x = asNumbers(columnValues(table, xCols[0] ?? first));
      const y = asNumbers(columnValues(table, yCols[0] ?? first));
      renderScatter(svg, x, y);
      break;
    }
    case "bar": {
      const labels = columnValues(table, xCols[0] ?? first);
      const y = asNumbers(columnValues(table, yCols[0] ?? xCols[0] ?? first));
      renderBar(svg, labels, y);
      break;
    }
    case "histogram": {
      renderHistogram(svg, asNumbers(columnValues(table, first)));
      break;
    }
    case "box": {
      const numericCols = encodings.map((e) => asNumbers(columnValues(table, e.column)));
      renderBox(svg, numericCols);
      break;
    }
    case "heatmap": {
      const x = asNumbers(columnValues(table, xCols[0] ?? first));
      const y = asNumbers(columnValues(table, yCols[0] ?? xCols[0] ?? first));
      renderHeatmap(svg, x, y);
      break;
    }
    default: {
      const warning = document.createElement("p");
      warning.className = "chart-warning";
      warning.textContent = `unknown chart type ${visType as string}; showing the raw table`;
      container.appendChild(warning);
      const fallback = document.createElement("table");
      fallback.className = "data-table fallback";
      const head = fallback.createTHead().insertRow();
      table.columns.forEach((c) => {
        const th = document.createElement("th");
        th.textContent = c;
        head.appendChild(th);
      });
      const body = fallback.createTBody();
      table.rows.slice(0, 10).forEach((row) => {
        const tr = body.insertRow();
        row.forEach((cell) => {
          tr.insertCell().textContent = cell === null ? "—" : String(cell);
        });
      });
      container.appendChild(fallback);
      return;
    }
  }
  container.appendChild(svg);
}
