// Typed client for the lvseg review service. All geometric truth shown in
// the UI comes from these JSON payloads; nothing is computed client-side.

export type Point = [number, number];

export interface AnchorsJson {
  septal: Point;
  lateral: Point;
  apex: Point;
  provenance: Record<string, string>;
}

export interface FrameResultJson {
  index: number;
  anchors: AnchorsJson;
  initial: Point[];
  refined: Point[] | null;
  snake_failed: boolean;
}

export interface SegmentationJson {
  version: string;
  clip_id: string;
  params_fingerprint: string;
  frames: FrameResultJson[];
}

export interface SessionInfo {
  session_id: string;
  n_frames: number;
  width: number;
  height: number;
}

export interface JobStatus {
  status: "idle" | "running" | "done" | "failed";
  failed_stage?: string;
}

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function request<T>(
  fetchFn: typeof fetch,
  url: string,
  init?: RequestInit,
): Promise<T> {
  let resp: Response;
  try {
    resp = await fetchFn(url, init);
  } catch (e) {
    throw new ApiError(0, `service unreachable (${String(e)})`);
  }
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = await resp.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class LvsegApi {
  constructor(
    private baseUrl: string,
    private fetchFn: typeof fetch = fetch,
  ) {}

  createSession(clipDir: string): Promise<SessionInfo> {
    return request<SessionInfo>(this.fetchFn, `${this.baseUrl}/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ clip_dir: clipDir }),
    });
  }

  frameUrl(sessionId: string, k: number): string {
    return `${this.baseUrl}/sessions/${sessionId}/frames/${k}`;
  }

  getResult(sessionId: string): Promise<SegmentationJson> {
    return request<SegmentationJson>(
      this.fetchFn,
      `${this.baseUrl}/sessions/${sessionId}/result`,
    );
  }

  getStatus(sessionId: string): Promise<JobStatus> {
    return request<JobStatus>(
      this.fetchFn,
      `${this.baseUrl}/sessions/${sessionId}/status`,
    );
  }

  startSegment(sessionId: string): Promise<{ job: string; status: string }> {
    return request(this.fetchFn, `${this.baseUrl}/sessions/${sessionId}/segment`, {
      method: "POST",
    });
  }

  patchAnchor(
    sessionId: string,
    frame: number,
    which: "septal" | "lateral" | "apex",
    point: Point,
  ): Promise<unknown> {
    return request(this.fetchFn, `${this.baseUrl}/sessions/${sessionId}/anchors`, {
      method: "PATCH",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ frame, [which]: point }),
    });
  }
}
