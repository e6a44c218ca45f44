/**
 * HTML-string rendering for both roles.
 *
 * Annotator rendering consumes only the blind TaskView fields (task_id,
 * text, session) — it has no access to votes or model scores by
 * construction, which a contract test enforces against this module's
 * source. Adjudicator rendering is the one place votes appear.
 */

import type { ConflictView, ProgressResponse } from './api.js';
import type { AnnotatorState, OptionView } from './state.js';
import { optionViews } from './state.js';

export function escapeHtml(raw: string): string {
  return raw
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

function renderOption(option: OptionView): string {
  const checked = option.selected ? ' checked' : '';
  const disabled = option.disabled ? ' disabled' : '';
  return (
    `<label class="option${option.disabled ? ' option-disabled' : ''}">` +
    `<input type="radio" name="decision" value="${option.decision}"${checked}${disabled}>` +
    `${option.decision === 'NonViolent' ? 'Non Violent' : option.decision}</label>`
  );
}

function renderProgressBar(count: number, cap: number): string {
  const percent = cap > 0 ? Math.min(100, Math.round((count / cap) * 100)) : 0;
  return (
    `<div class="progress" role="progressbar" aria-valuenow="${count}" aria-valuemax="${cap}">` +
    `<div class="progress-fill" style="width:${percent}%"></div>` +
    `<span class="progress-label">${count} of ${cap}</span></div>`
  );
}

export function renderAnnotator(state: AnnotatorState): string {
  const screen = state.screen;
  switch (screen.kind) {
    case 'loading':
      return '<section class="screen screen-loading"><p>Loading next task…</p></section>';
    case 'emptyQueue':
      return (
        '<section class="screen screen-empty"><h2>No tasks</h2>' +
        '<p>The queue is empty. Check back later.</p></section>'
      );
    case 'sessionLocked':
      return (
        '<section class="screen screen-locked"><h2>Session complete</h2>' +
        `<p>You have annotated ${screen.cap} comments this session. ` +
        'Start a new session after a break to continue.</p></section>'
      );
    case 'retry':
      return (
        '<section class="screen screen-retry"><div class="banner banner-error">' +
        `${escapeHtml(screen.message)}</div>` +
        '<button id="retry-button">Retry</button>' +
        (screen.pendingVote
          ? '<p class="note">Your vote is saved locally and will be resubmitted.</p>'
          : '') +
        '</section>'
      );
    case 'task': {
      const options = optionViews(screen.selected).map(renderOption).join('');
      return (
        '<section class="screen screen-task">' +
        renderProgressBar(screen.task.session.count, screen.task.session.cap) +
        `<blockquote class="comment" data-task-id="${escapeHtml(screen.task.task_id)}">` +
        `${escapeHtml(screen.task.text)}</blockquote>` +
        `<fieldset class="options">${options}</fieldset>` +
        `<label class="needs-context"><input type="checkbox" id="needs-context"` +
        `${screen.needsContext ? ' checked' : ''}>Needs more context</label>` +
        `<button id="submit-vote"${screen.selected === null ? ' disabled' : ''}>Submit</button>` +
        '</section>'
      );
    }
  }
}

function renderConflictVotes(conflict: ConflictView): string {
  const cells = Object.entries(conflict.votes)
    .map(
      ([who, vote]) =>
        `<div class="vote-card"><h4>${escapeHtml(who)}</h4>` +
        `<code>[${vote.labels.join(', ')}]</code>` +
        (vote.needs_context ? '<span class="flag">needs context</span>' : '') +
        '</div>',
    )
    .join('');
  return `<div class="votes-side-by-side">${cells}</div>`;
}

export function renderConflictList(conflicts: ConflictView[]): string {
  if (conflicts.length === 0) {
    return '<section class="screen"><p>No open conflicts.</p></section>';
  }
  const items = conflicts
    .map(
      (c) =>
        `<li class="conflict" data-task-id="${escapeHtml(c.task_id)}">` +
        `<blockquote class="comment">${escapeHtml(c.text)}</blockquote>` +
        renderConflictVotes(c) +
        '<div class="resolve-controls">' +
        '<select class="final-label"><option>Religio</option><option>Ethno</option>' +
        '<option>Nondenominational</option><option>Noncommunal</option>' +
        '<option>Non Violent</option></select>' +
        '<button class="resolve-accept">Resolve</button>' +
        '<button class="resolve-reject">Reject</button></div></li>',
    )
    .join('');
  return `<section class="screen"><ul class="conflict-list">${items}</ul></section>`;
}

export function renderProgressSummary(progress: ProgressResponse): string {
  const rows: Array<[string, number]> = [
    ['Open', progress.open],
    ['Agreed', progress.agreed],
    ['Conflict', progress.conflict],
    ['Resolved', progress.resolved],
    ['Accepted', progress.accepted],
    ['Total', progress.total],
  ];
  const cells = rows
    .map(([name, value]) => `<tr><th>${name}</th><td>${value}</td></tr>`)
    .join('');
  return `<table class="progress-summary">${cells}</table>`;
}
