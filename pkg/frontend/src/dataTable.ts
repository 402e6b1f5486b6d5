import { TableView } from "./types";

export const PAGE_SIZE = 10;

export function formatCell(value: string | number | null): string {
  if (value === null) {
    return "—";
  }
  return String(value);
}

/** Data Table View: paginated raw cells, first page by default. */
export function renderDataTable(container: HTMLElement, view: TableView, page = 0): void {
  container.textContent = "";
  const table = document.createElement("table");
  table.className = "data-table";

  const head = table.createTHead().insertRow();
  for (const name of view.columns) {
    const th = document.createElement("th");
    th.textContent = name;
    head.appendChild(th);
  }

  const body = table.createTBody();
  const start = page * PAGE_SIZE;
  for (const row of view.rows.slice(start, start + PAGE_SIZE)) {
    const tr = body.insertRow();
    for (const cell of row) {
      tr.insertCell().textContent = formatCell(cell);
    }
  }
  container.appendChild(table);

  if (view.rows.length > PAGE_SIZE) {
    const nav = document.createElement("div");
    nav.className = "table-pager";
    const pages = Math.ceil(view.rows.length / PAGE_SIZE);
    const label = document.createElement("span");
    label.textContent = `page ${page + 1} of ${pages} (${view.n_rows} rows)`;
    const prev = document.createElement("button");
    prev.textContent = "prev";
    prev.disabled = page === 0;
    prev.onclick = () => renderDataTable(container, view, page - 1);
    const next = document.createElement("button");
    next.textContent = "next";
    next.disabled = page >= pages - 1;
    next.onclick = () => renderDataTable(container, view, page + 1);
    nav.append(prev, label, next);
    container.appendChild(nav);
  }
}

export function renderError(container: HTMLElement, message: string): void {
  container.textContent = "";
  const panel = document.createElement("div");
  panel.className = "error-panel";
  panel.textContent = message;
  container.appendChild(panel);
}
