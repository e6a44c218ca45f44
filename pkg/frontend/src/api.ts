/**
 * Typed client for the annotation service HTTP+JSON API.
 *
 * This is the only way the UI talks to the backend; every payload shape
 * here mirrors the server contract, including the blindness guarantee:
 * annotator task payloads carry no votes and no model scores.
 */

export interface SessionInfo {
  count: number;
  cap: number;
}

/** Blind task payload served to annotators. */
export interface TaskView {
  task_id: string;
  text: string;
  session: SessionInfo;
}

export interface NextTaskResponse {
  task: TaskView | null;
  reason?: string;
}

export type ClassName = 'religio' | 'ethno' | 'nondenominational' | 'noncommunal';

export type LabelVector = Record<ClassName, 0 | 1>;

export interface VoteBody {
  annotator: string;
  labels: LabelVector;
  needs_context: boolean;
}

export interface VoteResponse {
  task_id: string;
  state: 'open' | 'agreed' | 'conflict';
}

export interface ConflictVote {
  labels: number[];
  needs_context: boolean;
}

export interface ConflictView {
  task_id: string;
  text: string;
  votes: Record<string, ConflictVote>;
}

export interface ProgressResponse {
  open: number;
  agreed: number;
  conflict: number;
  resolved: number;
  total: number;
  accepted: number;
}

export type ApiErrorKind = 'session_cap' | 'unauthorized' | 'state' | 'validation' | 'network';

/** Error carrying the server's machine-readable error kind. */
export class ApiError extends Error {
  constructor(
    readonly kind: ApiErrorKind,
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = 'ApiError';
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(path, {
      headers: { 'Content-Type': 'application/json' },
      ...init,
    });
  } catch (e) {
    throw new ApiError('network', 0, `network failure: ${String(e)}`);
  }
  if (!response.ok) {
    let kind: ApiErrorKind = 'validation';
    let detail = `${response.status} ${response.statusText}`;
    try {
      const body = (await response.json()) as { error?: ApiErrorKind; detail?: string };
      if (body.error) kind = body.error;
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status-line detail
    }
    throw new ApiError(kind, response.status, detail);
  }
  return response.json() as Promise<T>;
}

export class AnnotationApi {
  constructor(private readonly base: string = '') {}

  nextTask(annotator: string): Promise<NextTaskResponse> {
    const query = new URLSearchParams({ annotator });
    return request<NextTaskResponse>(`${this.base}/api/tasks/next?${query}`);
  }

  submitVote(taskId: string, body: VoteBody): Promise<VoteResponse> {
    return request<VoteResponse>(`${this.base}/api/tasks/${encodeURIComponent(taskId)}/vote`, {
      method: 'POST',
      body: JSON.stringify(body),
    });
  }

  conflicts(adjudicator: string): Promise<{ conflicts: ConflictView[] }> {
    const query = new URLSearchParams({ adjudicator });
    return request<{ conflicts: ConflictView[] }>(`${this.base}/api/conflicts?${query}`);
  }

  resolveConflict(
    taskId: string,
    adjudicator: string,
    labels: LabelVector | null,
    reject = false,
  ): Promise<{ task_id: string; state: string }> {
    return request(`${this.base}/api/conflicts/${encodeURIComponent(taskId)}/resolve`, {
      method: 'POST',
      body: JSON.stringify({ adjudicator, labels, reject }),
    });
  }

  progress(): Promise<ProgressResponse> {
    return request<ProgressResponse>(`${this.base}/api/progress`);
  }
}
