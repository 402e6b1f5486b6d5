import { fetchDatasets, fetchRecommendations, fetchRules, fetchTable, setBaseUrl } from "./api";
import { renderDataTable, renderError } from "./dataTable";
import { renderRecommendations } from "./recommendations";
import { renderRules } from "./rules";
import { ViewState } from "./state";
import { Recommendation, RulesPayload, TableView, VIS_TYPES } from "./types";
import "./style.css";

const state = new ViewState();
let rulesPayload: RulesPayload | null = null;
let tableView: TableView | null = null;

function el(id: string): HTMLElement {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found;
}

function refreshRules(): void {
  if (rulesPayload) {
    renderRules(el("rules-view"), rulesPayload, state);
  }
  (el("vis-type-select") as HTMLSelectElement).value = state.ruleFilter;
}

function onRulesClick(rec: Recommendation): void {
  state.activateRecommendation(rec);
  refreshRules();
  el("rules-view").scrollIntoView({ behavior: "smooth" });
}

async function loadDataset(id: string): Promise<void> {
  state.selectedDataset = id;
  state.clearRecommendation();
  try {
    tableView = await fetchTable(id);
    renderDataTable(el("table-view"), tableView);
  } catch (err) {
    renderError(el("table-view"), String(err));
    return;
  }
  try {
    const recs = await fetchRecommendations(id);
    renderRecommendations(el("recommendation-view"), recs, tableView, onRulesClick);
  } catch (err) {
    renderError(el("recommendation-view"), String(err));
  }
}

async function boot(): Promise<void> {
  setBaseUrl((window as { VIZREC_API?: string }).VIZREC_API ?? "");

  const typeSelect = el("vis-type-select") as HTMLSelectElement;
  typeSelect.innerHTML =
    `<option value="all">all chart types</option>` +
    VIS_TYPES.map((vt) => `<option value="${vt}">${vt}</option>`).join("");
  typeSelect.onchange = () => {
    state.ruleFilter = typeSelect.value as typeof state.ruleFilter;
    state.clearRecommendation();
    refreshRules();
  };

  try {
    rulesPayload = await fetchRules();
    refreshRules();
  } catch (err) {
    renderError(el("rules-view"), String(err));
  }

  const datasetSelect = el("dataset-select") as HTMLSelectElement;
  try {
    const datasets = await fetchDatasets();
    datasetSelect.innerHTML = datasets
      .map((d) => `<option value="${d.id}">${d.name} (${d.n_columns}×${d.n_rows})</option>`)
      .join("");
    datasetSelect.onchange = () => void loadDataset(datasetSelect.value);
    if (datasets.length) {
      void loadDataset(datasets[0].id);
    }
  } catch (err) {
    renderError(el("table-view"), String(err));
  }
}

if (document.readyState !== "loading") {
  void boot();
} else {
  document.addEventListener("DOMContentLoaded", () => void boot());
}
