/**
 * Wiring between the pure view-model, the renderer, and the DOM.
 *
 * The controller owns the fetch-display-submit loop; votes are held in the
 * state until the server acknowledges them, so a network failure never
 * loses work.
 */

import { AnnotationApi, ApiError } from './api.js';
import { renderAnnotator, renderConflictList, renderProgressSummary } from './render.js';
import {
  AnnotatorState,
  Decision,
  initialState,
  needsContextToggled,
  optionPicked,
  pendingVote,
  requestFailed,
  sessionCapHit,
  taskReceived,
  voteAcknowledged,
  type PendingVote,
} from './state.js';

export class AnnotatorController {
  private state: AnnotatorState;

  constructor(
    annotator: string,
    private readonly api: AnnotationApi,
    private readonly mount: (html: string) => void,
  ) {
    this.state = initialState(annotator);
  }

  snapshot(): AnnotatorState {
    return this.state;
  }

  private commit(next: AnnotatorState): void {
    this.state = next;
    this.mount(renderAnnotator(this.state));
  }

  async fetchNext(): Promise<void> {
    this.commit({ ...this.state, screen: { kind: 'loading' } });
    try {
      const response = await this.api.nextTask(this.state.annotator);
      this.commit(taskReceived(this.state, response.task));
    } catch (e) {
      if (e instanceof ApiError && e.kind === 'session_cap') {
        this.commit(sessionCapHit(this.state));
        return;
      }
      this.commit(requestFailed(this.state, String(e), null));
    }
  }

  pick(decision: Decision): void {
    this.commit(optionPicked(this.state, decision));
  }

  toggleNeedsContext(): void {
    this.commit(needsContextToggled(this.state));
  }

  async submit(): Promise<void> {
    const vote = pendingVote(this.state);
    if (vote === null) return;
    await this.send(vote);
  }

  /** Resubmit the locally-held vote after a failure. */
  async retry(): Promise<void> {
    const screen = this.state.screen;
    if (screen.kind !== 'retry') return;
    if (screen.pendingVote) {
      await this.send(screen.pendingVote);
    } else {
      await this.fetchNext();
    }
  }

  private async send(vote: PendingVote): Promise<void> {
    try {
      await this.api.submitVote(vote.taskId, {
        annotator: this.state.annotator,
        labels: vote.labels,
        needs_context: vote.needsContext,
      });
      this.commit(voteAcknowledged(this.state));
      if (this.state.screen.kind === 'loading') {
        await this.fetchNext();
      }
    } catch (e) {
      if (e instanceof ApiError && e.kind === 'session_cap') {
        this.commit(sessionCapHit(this.state));
        return;
      }
      this.commit(requestFailed(this.state, String(e), vote));
    }
  }
}

export class AdjudicatorController {
  constructor(
    private readonly adjudicator: string,
    private readonly api: AnnotationApi,
    private readonly mount: (html: string) => void,
  ) {}

  async refresh(): Promise<void> {
    const [conflictsResponse, progress] = await Promise.all([
      this.api.conflicts(this.adjudicator),
      this.api.progress(),
    ]);
    this.mount(
      renderProgressSummary(progress) + renderConflictList(conflictsResponse.conflicts),
    );
  }

  async resolve(taskId: string, decision: Decision | 'reject'): Promise<void> {
    if (decision === 'reject') {
      await this.api.resolveConflict(taskId, this.adjudicator, null, true);
    } else {
      const { decisionToLabels } = await import('./state.js');
      await this.api.resolveConflict(taskId, this.adjudicator, decisionToLabels(decision));
    }
    await this.refresh();
  }
}

/** Entry point used by static/index.html. */
export function boot(root: HTMLElement, role: string, userId: string): void {
  const api = new AnnotationApi('');
  const mount = (html: string): void => {
    root.innerHTML = html;
  };
  if (role === 'adjudicator') {
    const controller = new AdjudicatorController(userId, api, mount);
    root.addEventListener('click', (event) => {
      const target = event.target as HTMLElement;
      const item = target.closest<HTMLElement>('.conflict');
      if (!item || !item.dataset.taskId) return;
      if (target.classList.contains('resolve-reject')) {
        void controller.resolve(item.dataset.taskId, 'reject');
      } else if (target.classList.contains('resolve-accept')) {
        const select = item.querySelector<HTMLSelectElement>('.final-label');
        const picked = select?.value === 'Non Violent' ? 'NonViolent' : select?.value;
        void controller.resolve(item.dataset.taskId, (picked ?? 'NonViolent') as Decision);
      }
    });
    void controller.refresh();
    return;
  }
  const controller = new AnnotatorController(userId, api, mount);
  root.addEventListener('change', (event) => {
    const target = event.target as HTMLInputElement;
    if (target.name === 'decision') controller.pick(target.value as Decision);
    if (target.id === 'needs-context') controller.toggleNeedsContext();
  });
  root.addEventListener('click', (event) => {
    const target = event.target as HTMLElement;
    if (target.id === 'submit-vote') void controller.submit();
    if (target.id === 'retry-button') void controller.retry();
  });
  void controller.fetchNext();
}
