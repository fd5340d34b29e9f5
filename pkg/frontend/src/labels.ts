// One fixed colour per entity label, shared by the viewer, the training
// page and the legend.

import type { EntityLabel } from "./types.js";
import { ENTITY_LABELS } from "./types.js";

export const LABEL_COLORS: Record<EntityLabel, string> = {
  class: "#c5b3e6",
  material: "#9bd49b",
  me_method: "#f2c18d",
  pressure: "#8fc9e8",
  tc: "#f5e678",
  tcValue: "#f0a8a8",
};

export function renderLegend(doc: Document): HTMLElement {
  const legend = doc.createElement("div");
  legend.className = "label-legend";
  for (const label of ENTITY_LABELS) {
    const chip = doc.createElement("span");
    chip.className = "legend-chip";
    chip.style.backgroundColor = LABEL_COLORS[label];
    chip.textContent = label;
    legend.appendChild(chip);
  }
  return legend;
}
