/** Interval table: one row per configuration, one column per level.
 * Values are rendered verbatim from the payload (String of the JSON number),
 * so what is displayed is exactly what the server sent. */

import type { PredictResponse } from "../types.js";

export interface TableRow {
  name: string;
  payload: PredictResponse;
}

export function renderIntervalTable(container: HTMLElement, rows: TableRow[],
                                    levels: string[]): void {
  if (rows.length === 0) {
    container.innerHTML = '<p class="placeholder">Nothing pinned yet.</p>';
    return;
  }
  const head = levels.map((lv) => `<th>${Number(lv) * 100}% interval</th>`).join("");
  const body = rows
    .map((row) => {
      const cells = levels
        .map((lv) => {
          const pair = row.payload.intervals[lv];
          if (!pair) {
            return '<td class="missing">-</td>';
          }
          return `<td data-level="${lv}">[${String(pair[0])}, ${String(pair[1])}]</td>`;
        })
        .join("");
      return `<tr><th scope="row">${row.name}</th>` +
             `<td data-median>${String(row.payload.median)}</td>${cells}</tr>`;
    })
    .join("");
  container.innerHTML =
    `<table class="intervals"><thead><tr><th>configuration</th><th>median</th>` +
    `${head}</tr></thead><tbody>${body}</tbody></table>`;
}
