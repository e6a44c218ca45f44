/**
 * Pure view-model for the annotator flow.
 *
 * All transitions are plain functions over immutable state so the flow is
 * testable without a DOM. The session lock and the Noncommunal exclusivity
 * rule live here, not in the rendering layer.
 */

import type { ClassName, LabelVector, TaskView } from './api.js';

/** The five single-choice decisions offered to an annotator. */
export type Decision = 'Religio' | 'Ethno' | 'Nondenominational' | 'Noncommunal' | 'NonViolent';

export const DECISIONS: readonly Decision[] = [
  'Religio',
  'Ethno',
  'Nondenominational',
  'Noncommunal',
  'NonViolent',
];

const DECISION_TO_CLASS: Record<Decision, ClassName | null> = {
  Religio: 'religio',
  Ethno: 'ethno',
  Nondenominational: 'nondenominational',
  Noncommunal: 'noncommunal',
  NonViolent: null,
};

/** Map a single-choice decision to the four-flag vote vector. */
export function decisionToLabels(decision: Decision): LabelVector {
  const labels: LabelVector = { religio: 0, ethno: 0, nondenominational: 0, noncommunal: 0 };
  const cls = DECISION_TO_CLASS[decision];
  if (cls !== null) labels[cls] = 1;
  return labels;
}

export interface OptionView {
  decision: Decision;
  selected: boolean;
  /** Exclusivity: selecting Noncommunal greys out the other violence classes. */
  disabled: boolean;
}

/**
 * Option rows for the current selection. Noncommunal is exclusive, so while
 * it is selected the three other violence classes are disabled; NonViolent
 * stays enabled because switching to "no violence" is always legal.
 */
export function optionViews(selected: Decision | null): OptionView[] {
  const noncommunalSelected = selected === 'Noncommunal';
  return DECISIONS.map((decision) => ({
    decision,
    selected: decision === selected,
    disabled:
      noncommunalSelected && decision !== 'Noncommunal' && decision !== 'NonViolent',
  }));
}

export type AnnotatorScreen =
  | { kind: 'loading' }
  | { kind: 'task'; task: TaskView; selected: Decision | null; needsContext: boolean }
  | { kind: 'emptyQueue' }
  | { kind: 'sessionLocked'; cap: number }
  | { kind: 'retry'; message: string; pendingVote: PendingVote | null };

/** A vote held locally until the server acknowledges it. */
export interface PendingVote {
  taskId: string;
  labels: LabelVector;
  needsContext: boolean;
}

export interface AnnotatorState {
  annotator: string;
  screen: AnnotatorScreen;
  submittedThisSession: number;
  cap: number;
}

export function initialState(annotator: string, cap = 50): AnnotatorState {
  return { annotator, screen: { kind: 'loading' }, submittedThisSession: 0, cap };
}

export function taskReceived(state: AnnotatorState, task: TaskView | null): AnnotatorState {
  if (task === null) {
    return { ...state, screen: { kind: 'emptyQueue' } };
  }
  return {
    ...state,
    cap: task.session.cap,
    submittedThisSession: task.session.count,
    screen: { kind: 'task', task, selected: null, needsContext: false },
  };
}

export function optionPicked(state: AnnotatorState, decision: Decision): AnnotatorState {
  if (state.screen.kind !== 'task') return state;
  return { ...state, screen: { ...state.screen, selected: decision } };
}

export function needsContextToggled(state: AnnotatorState): AnnotatorState {
  if (state.screen.kind !== 'task') return state;
  return { ...state, screen: { ...state.screen, needsContext: !state.screen.needsContext } };
}

/** The vote to submit, or null when nothing is selected yet. */
export function pendingVote(state: AnnotatorState): PendingVote | null {
  if (state.screen.kind !== 'task' || state.screen.selected === null) return null;
  return {
    taskId: state.screen.task.task_id,
    labels: decisionToLabels(state.screen.selected),
    needsContext: state.screen.needsContext,
  };
}

export function voteAcknowledged(state: AnnotatorState): AnnotatorState {
  const submitted = state.submittedThisSession + 1;
  if (submitted >= state.cap) {
    return {
      ...state,
      submittedThisSession: submitted,
      screen: { kind: 'sessionLocked', cap: state.cap },
    };
  }
  return { ...state, submittedThisSession: submitted, screen: { kind: 'loading' } };
}

export function sessionCapHit(state: AnnotatorState): AnnotatorState {
  return { ...state, screen: { kind: 'sessionLocked', cap: state.cap } };
}

/** Network failure: keep the unacknowledged vote so nothing is lost. */
export function requestFailed(
  state: AnnotatorState,
  message: string,
  unacknowledged: PendingVote | null,
): AnnotatorState {
  return { ...state, screen: { kind: 'retry', message, pendingVote: unacknowledged } };
}
