import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { describe, expect, it } from 'vitest';

import type { TaskView } from './api.js';
import { renderAnnotator, renderConflictList, renderProgressSummary } from './render.js';
import { initialState, optionPicked, taskReceived } from './state.js';

const here = dirname(fileURLToPath(import.meta.url));

const task = (overrides: Partial<TaskView> = {}): TaskView => ({
  task_id: 't1',
  text: 'একটি মন্তব্য',
  session: { count: 7, cap: 50 },
  ...overrides,
});

describe('annotator blindness contract', () => {
  it('renders no vote or score fields even if the payload smuggles them in', () => {
    // a malicious/buggy backend payload with extra fields must not leak
    const leaky = {
      ...task(),
      votes: { other: { labels: [1, 0, 0, 0], needs_context: false } },
      model_score: [0.97, 0.01, 0.01, 0.01],
    } as unknown as TaskView;
    const html = renderAnnotator(taskReceived(initialState('a1'), leaky));
    expect(html).not.toContain('votes');
    expect(html).not.toContain('model_score');
    expect(html).not.toContain('0.97');
  });

  it('annotator-mode code paths never read a votes field', () => {
    const stripComments = (source: string): string =>
      source.replace(/\/\*[\s\S]*?\*\//g, '').replace(/\/\/.*$/gm, '');
    // contract check over the modules an annotator session executes
    for (const module of ['state.ts', 'api.ts']) {
      const source = stripComments(readFileSync(join(here, module), 'utf-8'));
      const annotatorSection = module === 'api.ts'
        ? source.slice(0, source.indexOf('ConflictVote')) // adjudicator types live below
        : source;
      expect(annotatorSection).not.toMatch(/\bvotes\b/);
      expect(annotatorSection).not.toMatch(/model_score/);
    }
    const render = stripComments(readFileSync(join(here, 'render.ts'), 'utf-8'));
    const annotatorRender = render.slice(0, render.indexOf('renderConflictVotes'));
    expect(annotatorRender).not.toMatch(/\bvotes\b/);
  });
});

describe('renderAnnotator screens', () => {
  it('task screen shows text, progress, and all five options', () => {
    const html = renderAnnotator(taskReceived(initialState('a1'), task()));
    expect(html).toContain('একটি মন্তব্য');
    expect(html).toContain('7 of 50');
    for (const option of ['Religio', 'Ethno', 'Nondenominational', 'Noncommunal', 'Non Violent']) {
      expect(html).toContain(option);
    }
    expect(html).toContain('<button id="submit-vote" disabled>');
  });

  it('submit enables once a decision is picked', () => {
    let state = taskReceived(initialState('a1'), task());
    state = optionPicked(state, 'Religio');
    expect(renderAnnotator(state)).toContain('<button id="submit-vote">');
  });

  it('Noncommunal selection renders the other classes as disabled inputs', () => {
    let state = taskReceived(initialState('a1'), task());
    state = optionPicked(state, 'Noncommunal');
    const html = renderAnnotator(state);
    expect(html).toContain('value="Religio" disabled');
    expect(html).toContain('value="Ethno" disabled');
    expect(html).toContain('value="Nondenominational" disabled');
    expect(html).toContain('value="Noncommunal" checked');
    expect(html).not.toContain('value="NonViolent" disabled');
  });

  it('session-locked screen names the cap', () => {
    const html = renderAnnotator({
      annotator: 'a1',
      screen: { kind: 'sessionLocked', cap: 50 },
      submittedThisSession: 50,
      cap: 50,
    });
    expect(html).toContain('Session complete');
    expect(html).toContain('50 comments');
  });

  it('escapes comment text', () => {
    const html = renderAnnotator(
      taskReceived(initialState('a1'), task({ text: '<script>alert(1)</script>' })),
    );
    expect(html).not.toContain('<script>');
    expect(html).toContain('&lt;script&gt;');
  });
});

describe('adjudicator rendering', () => {
  it('shows both votes side by side', () => {
    const html = renderConflictList([
      {
        task_id: 'c1',
        text: 'disputed comment',
        votes: {
          a1: { labels: [1, 0, 0, 0], needs_context: false },
          a2: { labels: [0, 0, 0, 1], needs_context: true },
        },
      },
    ]);
    expect(html).toContain('a1');
    expect(html).toContain('a2');
    expect(html).toContain('[1, 0, 0, 0]');
    expect(html).toContain('[0, 0, 0, 1]');
    expect(html).toContain('needs context');
  });

  it('renders the progress counts', () => {
    const html = renderProgressSummary({
      open: 3,
      agreed: 2,
      conflict: 1,
      resolved: 4,
      total: 10,
      accepted: 6,
    });
    expect(html).toContain('<th>Agreed</th><td>2</td>');
    expect(html).toContain('<th>Total</th><td>10</td>');
  });
});
