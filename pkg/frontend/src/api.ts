import {
  DatasetSummary,
  RecommendationsPayload,
  RulesPayload,
  TableView,
} from "./types";

let baseUrl = "";

export function setBaseUrl(url: string): void {
  baseUrl = url.replace(/\/$/, "");
}

async function getJson<T>(path: string): Promise<T> {
  const resp = await fetch(`${baseUrl}${path}`);
  if (!resp.ok) {
    throw new Error(`${path}: HTTP ${resp.status}`);
  }
  return (await resp.json()) as T;
}

export function fetchDatasets(): Promise<DatasetSummary[]> {
  return getJson("/api/datasets");
}

export function fetchTable(id: string, rows = 1000): Promise<TableView> {
  return getJson(`/api/datasets/${encodeURIComponent(id)}/table?rows=${rows}`);
}

export function fetchRecommendations(id: string, k = 3): Promise<RecommendationsPayload> {
  return getJson(`/api/datasets/${encodeURIComponent(id)}/recommendations?k=${k}`);
}

export function fetchRules(perType = 5): Promise<RulesPayload> {
  return getJson(`/api/rules?per_type=${perType}`);
}

export async function uploadCsv(name: string, csv: string): Promise<string> {
  const resp = await fetch(`${baseUrl}/api/datasets?name=${encodeURIComponent(name)}`, {
    method: "POST",
    headers: { "content-type": "text/csv" },
    body: csv,
  });
  if (!resp.ok) {
    throw new Error(`upload failed: HTTP ${resp.status}`);
  }
  const body = (await resp.json()) as { id: string };
  return body.id;
}
