/**
 * Trace panel rendering: one collapsible block per agent reply showing
 * the chosen action and skill, the price chips, the anticipated buyer
 * moves, and the planner's rationale lines.
 */

import type { DecisionTrace, SnapshotDecision } from "./api.js";
import { formatMinor } from "./api.js";

/** Skill style guidance, surfaced verbatim as badge tooltips. */
export const SKILL_DEFINITIONS: Record<string, string> = {
  EMPHASIS:
    "Highlight the cost value, quality or bottom price of the product to show the rationality of the pricing.",
  ADDED_VALUE:
    "Provide additional value beyond the product, such as gifts, free shipping, etc.",
  EMOTIONAL:
    "Use humor, expressions, complaints, and identity recognition to resonate with the other party.",
  COMPARE_MARKET:
    "Compare the product with other products on the market to highlight the advantages of its own products.",
  TRANSACTION_GUARANTEE:
    "Promise to ensure transaction security and reliability by offering good after-sales service.",
  CREATE_URGENCY:
    "Create urgency by reminding that the product may sell out soon or prices may rise shortly.",
  CHAT: "Do not use techniques and simply reply to the other party.",
};

export function traceFromSnapshotDecision(decision: SnapshotDecision): DecisionTrace {
  return {
    action: decision.action,
    skill: decision.skill,
    seller_price:
      decision.seller_price === null ? null : formatMinor(decision.seller_price),
    buyer_price_seen:
      decision.buyer_price_seen === null ? null : formatMinor(decision.buyer_price_seen),
    anticipated_buyer_moves: decision.anticipated_buyer_moves ?? [],
    rationale: decision.rationale ?? [],
  };
}

function chip(text: string, className: string, tooltip?: string): HTMLSpanElement {
  const span = document.createElement("span");
  span.className = `chip ${className}`;
  span.textContent = text;
  if (tooltip) span.title = tooltip;
  return span;
}

export function renderTrace(trace: DecisionTrace): HTMLElement {
  const details = document.createElement("details");
  details.className = "trace";

  const summary = document.createElement("summary");
  const actionLabel = trace.seller_price
    ? `${trace.action} @ ${trace.seller_price}`
    : trace.action;
  summary.appendChild(chip(actionLabel, "chip-action"));
  if (trace.skill) {
    summary.appendChild(
      chip(trace.skill, "chip-skill", SKILL_DEFINITIONS[trace.skill]),
    );
  }
  if (trace.buyer_price_seen) {
    summary.appendChild(
      chip(`extracted ${trace.buyer_price_seen}`, "chip-extracted"),
    );
  }
  details.appendChild(summary);

  const body = document.createElement("div");
  body.className = "trace-body";
  if (trace.anticipated_buyer_moves.length > 0) {
    const section = document.createElement("div");
    section.className = "trace-anticipation";
    const heading = document.createElement("div");
    heading.className = "trace-heading";
    heading.textContent = "Anticipated buyer moves";
    section.appendChild(heading);
    const list = document.createElement("ul");
    for (const move of trace.anticipated_buyer_moves) {
      const item = document.createElement("li");
      item.textContent = move;
      list.appendChild(item);
    }
    section.appendChild(list);
    body.appendChild(section);
  }
  if (trace.rationale.length > 0) {
    const section = document.createElement("div");
    section.className = "trace-rationale";
    const heading = document.createElement("div");
    heading.className = "trace-heading";
    heading.textContent = "Rationale";
    section.appendChild(heading);
    const list = document.createElement("ul");
    for (const line of trace.rationale) {
      const item = document.createElement("li");
      item.textContent = line;
      list.appendChild(item);
    }
    section.appendChild(list);
    body.appendChild(section);
  }
  details.appendChild(body);
  return details;
}
