// The session phase machine. Phases only move forward; every control in the
// DOM is gated on these predicates so no click can violate a session rule.

import type { SessionState } from "./api.js";

export type Phase = "eliciting" | "collecting" | "revealed";

const ORDER: Phase[] = ["eliciting", "collecting", "revealed"];

export function phaseOf(session: SessionState): Phase {
  if (session.revealed) return "revealed";
  if (session.prior_locked) return "collecting";
  return "eliciting";
}

/** Forward-only transition: never goes back even on a stale hint. */
export function advance(current: Phase, next: Phase): Phase {
  return ORDER.indexOf(next) >= ORDER.indexOf(current) ? next : current;
}

export const can = {
  editPrior: (p: Phase) => p === "eliciting",
  lockPrior: (p: Phase) => p === "eliciting",
  submitTally: (p: Phase) => p === "collecting",
  reveal: (p: Phase) => p === "collecting",
  checkLotCode: (p: Phase) => p === "revealed",
};
