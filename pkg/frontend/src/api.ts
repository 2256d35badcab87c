/** Thin client for the annotation backend; the only network access. */

import type { ComputedPayload, Connection, PairPayload, PostSummary } from './types.js';

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { error?: string };
      if (body.error) detail = body.error;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(private readonly base: string = '') {}

  async listPosts(): Promise<PostSummary[]> {
    const payload = await asJson<{ posts: PostSummary[] }>(await fetch(`${this.base}/api/posts`));
    return payload.posts;
  }

  async getPair(postId: string, pairIndex: number): Promise<PairPayload> {
    return asJson(await fetch(`${this.base}/api/posts/${postId}/pairs/${pairIndex}`));
  }

  async putConnections(
    postId: string,
    pairIndex: number,
    connections: Array<Pick<Connection, 'leftLocalId' | 'rightLocalId'>>,
  ): Promise<Connection[]> {
    const response = await fetch(
      `${this.base}/api/posts/${postId}/pairs/${pairIndex}/connections`,
      {
        method: 'PUT',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({ connections }),
      },
    );
    const body = await asJson<{ connections: Connection[] }>(response);
    return body.connections;
  }

  async postComment(
    postId: string,
    postHistoryId: string,
    localId: string,
    text: string,
  ): Promise<void> {
    await asJson(
      await fetch(`${this.base}/api/posts/${postId}/blocks/${postHistoryId}/${localId}/comment`, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({ text }),
      }),
    );
  }

  async getComputed(postId: string): Promise<ComputedPayload> {
    return asJson(await fetch(`${this.base}/api/posts/${postId}/computed`));
  }

  async exportGroundTruth(): Promise<string> {
    const response = await fetch(`${this.base}/api/export`);
    if (!response.ok) throw new ApiError(response.status, response.statusText);
    return response.text();
  }
}
