import { describe, expect, it } from 'vitest';

import type { AnnotationApi, NextTaskResponse, VoteBody, VoteResponse } from './api.js';
import { ApiError } from './api.js';
import { AnnotatorController } from './app.js';

/**
 * Mock service implementing the server-side rules the flow depends on:
 * a 50-vote session cap and acknowledgment-based vote recording.
 */
class MockService {
  votes: Array<{ taskId: string; body: VoteBody }> = [];
  sessionCount = 0;
  cap = 50;
  failNextSubmit = false;
  private nextId = 0;

  api(): AnnotationApi {
    return {
      nextTask: async (): Promise<NextTaskResponse> => {
        if (this.sessionCount >= this.cap) {
          throw new ApiError('session_cap', 409, 'session cap reached');
        }
        this.nextId += 1;
        return {
          task: {
            task_id: `t${this.nextId}`,
            text: `comment ${this.nextId}`,
            session: { count: this.sessionCount, cap: this.cap },
          },
        };
      },
      submitVote: async (taskId: string, body: VoteBody): Promise<VoteResponse> => {
        if (this.failNextSubmit) {
          this.failNextSubmit = false;
          throw new ApiError('network', 0, 'network failure: offline');
        }
        if (this.sessionCount >= this.cap) {
          throw new ApiError('session_cap', 409, 'session cap reached');
        }
        this.votes.push({ taskId, body });
        this.sessionCount += 1;
        return { task_id: taskId, state: 'open' };
      },
      conflicts: async () => ({ conflicts: [] }),
      resolveConflict: async () => ({ task_id: '', state: 'resolved' }),
      progress: async () => ({
        open: 0, agreed: 0, conflict: 0, resolved: 0, total: 0, accepted: 0,
      }),
    } as unknown as AnnotationApi;
  }
}

function makeController(service: MockService): { controller: AnnotatorController; html: () => string } {
  let current = '';
  const controller = new AnnotatorController('a1', service.api(), (html) => {
    current = html;
  });
  return { controller, html: () => current };
}

describe('annotate flow against a mocked API', () => {
  it('fetch -> pick -> submit advances to the next task', async () => {
    const service = new MockService();
    const { controller, html } = makeController(service);
    await controller.fetchNext();
    expect(html()).toContain('comment 1');
    controller.pick('Religio');
    await controller.submit();
    expect(service.votes).toHaveLength(1);
    expect(service.votes[0].body.labels.religio).toBe(1);
    expect(html()).toContain('comment 2'); // auto-advanced
  });

  it('locks with the session-complete screen after the 50th submission', async () => {
    const service = new MockService();
    const { controller, html } = makeController(service);
    await controller.fetchNext();
    for (let i = 0; i < 50; i += 1) {
      controller.pick('NonViolent');
      await controller.submit();
    }
    expect(service.votes).toHaveLength(50);
    expect(controller.snapshot().screen.kind).toBe('sessionLocked');
    expect(html()).toContain('Session complete');
    // and further submits do nothing
    await controller.submit();
    expect(service.votes).toHaveLength(50);
  });

  it('locks when the server rejects the fetch with the cap error', async () => {
    const service = new MockService();
    service.sessionCount = 50;
    const { controller, html } = makeController(service);
    await controller.fetchNext();
    expect(html()).toContain('Session complete');
  });

  it('holds the vote across a network failure and resubmits on retry', async () => {
    const service = new MockService();
    const { controller, html } = makeController(service);
    await controller.fetchNext();
    controller.pick('Ethno');
    service.failNextSubmit = true;
    await controller.submit();
    expect(html()).toContain('Retry');
    expect(html()).toContain('saved locally');
    expect(service.votes).toHaveLength(0);

    await controller.retry();
    expect(service.votes).toHaveLength(1);
    expect(service.votes[0].body.labels.ethno).toBe(1);
    expect(html()).toContain('comment 2');
  });

  it('shows the no-tasks screen on an empty queue', async () => {
    const service = new MockService();
    const api = service.api();
    (api as { nextTask: () => Promise<NextTaskResponse> }).nextTask = async () => ({
      task: null,
      reason: 'empty_queue',
    });
    let current = '';
    const controller = new AnnotatorController('a1', api, (h) => {
      current = h;
    });
    await controller.fetchNext();
    expect(current).toContain('No tasks');
  });
});
