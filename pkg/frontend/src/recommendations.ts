import { renderChart } from "./charts";
import { Recommendation, RecommendationsPayload, TableView } from "./types";

/** Recommendation View: one card per ranked chart, each with a Rules button
 *  that routes the user to that chart type's rules. */
export function renderRecommendations(
  container: HTMLElement,
  payload: RecommendationsPayload,
  table: TableView,
  onRulesClick: (rec: Recommendation) => void,
): void {
  container.textContent = "";
  for (const rec of payload.recommendations) {
    const card = document.createElement("div");
    card.className = "recommendation-card";
    card.dataset.rank = String(rec.rank);
    card.dataset.visType = rec.vis_type;

    const header = document.createElement("div");
    header.className = "recommendation-header";
    const title = document.createElement("h3");
    title.textContent = `#${rec.rank} ${rec.vis_type}`;
    header.appendChild(title);
    const button = document.createElement("button");
    button.className = "rules-button";
    button.textContent = "Rules";
    button.onclick = () => onRulesClick(rec);
    header.appendChild(button);
    card.appendChild(header);

    const chart = document.createElement("div");
    chart.className = "chart-holder";
    renderChart(chart, rec.vis_type, rec.encodings, table);
    card.appendChild(chart);

    const encodings = document.createElement("p");
    encodings.className = "encodings";
    encodings.textContent = rec.encodings
      .map((e) => `${table.columns[e.column] ?? e.column} → ${e.axis}-axis`)
      .join(", ");
    card.appendChild(encodings);

    container.appendChild(card);
  }
}
