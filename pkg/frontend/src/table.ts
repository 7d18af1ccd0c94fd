/** Synchronized version table: one row per lineage entry, highlighting the
 * row that matches the node selected in the graph. */

import type { Lineage, LineageItem } from "./types.js";

export class TableView {
  private readonly container: HTMLElement;
  private readonly doc: Document;
  onRowSelect: ((nodeId: string) => void) | null = null;

  constructor(container: HTMLElement) {
    this.container = container;
    this.doc = container.ownerDocument;
  }

  render(lineage: Lineage | null, activeNode: string | null): void {
    this.container.textContent = "";
    if (lineage === null) return;
    const table = this.doc.createElement("table");
    table.className = "version-table";
    const head = this.doc.createElement("tr");
    for (const title of ["Version", "Implementation", "Created", "Last tx", "Txs", "Changes", "Vulnerabilities"]) {
      const th = this.doc.createElement("th");
      th.textContent = title;
      head.appendChild(th);
    }
    table.appendChild(head);
    for (const item of lineage.versions) {
      table.appendChild(this.row(item, activeNode));
    }
    this.container.appendChild(table);
  }

  private row(item: LineageItem, activeNode: string | null): HTMLTableRowElement {
    const version = item.version;
    const nodeId = `version:${version.proxy}:${version.version_number}`;
    const tr = this.doc.createElement("tr");
    tr.className = "version-row";
    tr.dataset.nodeId = nodeId;
    if (nodeId === activeNode) tr.classList.add("active");
    const cells = [
      `v${version.version_number}`,
      version.contract_address,
      formatTime(version.creation_timestamp),
      formatTime(version.last_tx_timestamp),
      String(version.total_transactions),
      item.change ? item.change.categories.join(", ") : "—",
      version.vulnerabilities.join(", ") || "—",
    ];
    for (const text of cells) {
      const td = this.doc.createElement("td");
      td.textContent = text;
      tr.appendChild(td);
    }
    tr.addEventListener("click", () => this.onRowSelect?.(nodeId));
    return tr;
  }
}

function formatTime(timestamp: number | null | undefined): string {
  if (timestamp === null || timestamp === undefined) return "—";
  return new Date(timestamp * 1000).toISOString().replace("T", " ").slice(0, 19);
}
