/** Application bootstrap: routing, event wiring, keyboard navigation. */

import { ApiClient, ApiError } from './api.js';
import {
  PairViewState,
  Side,
  clickBlock,
  connectReplacing,
  connectionKeySet,
  initialState,
  setComment,
  validate,
} from './state.js';
import { DisagreementFlags, disagreementFlags, renderDiffPanel, renderPair, renderPostList } from './render.js';
import type { PostSummary } from './types.js';

const api = new ApiClient();

interface AppState {
  posts: PostSummary[];
  postId: string | null;
  pair: PairViewState | null;
  rightPostHistoryId: string | null;
  flags: DisagreementFlags | null;
}

const app: AppState = { posts: [], postId: null, pair: null, rightPostHistoryId: null, flags: null };

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function draw(): void {
  el('posts').innerHTML = renderPostList(app.posts, app.postId);
  if (app.pair) {
    el('pair').innerHTML = renderPair(app.pair, app.flags);
    el('diffs').innerHTML = renderDiffPanel(app.pair);
    el('status').textContent =
      `post ${app.pair.postId}, pair ${app.pair.pairIndex}` +
      (app.pair.dirty ? ' (unsaved)' : '') +
      (app.pair.mode === 'compare-computed' ? ' [compare mode]' : '');
  } else {
    el('pair').innerHTML = '<p class="hint">Pick a post on the left.</p>';
    el('diffs').innerHTML = '';
    el('status').textContent = '';
  }
}

async function loadPosts(): Promise<void> {
  app.posts = await api.listPosts();
  draw();
}

async function openPair(postId: string, pairIndex: number): Promise<void> {
  try {
    const payload = await api.getPair(postId, pairIndex);
    app.postId = postId;
    app.pair = initialState(payload);
    app.rightPostHistoryId = payload.right.postHistoryId;
    app.flags = null;
    draw();
  } catch (error) {
    showBanner(`failed to load pair: ${describe(error)}`, () => openPair(postId, pairIndex));
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `${error.status} ${error.message}`;
  return String(error);
}

function showBanner(message: string, retry: (() => void) | null): void {
  const banner = el('banner');
  banner.innerHTML =
    `<span>${message}</span>` + (retry ? ' <button id="retry">retry</button>' : '');
  banner.hidden = false;
  if (retry) {
    document.getElementById('retry')?.addEventListener('click', () => {
      banner.hidden = true;
      retry();
    });
  }
  if (!retry) setTimeout(() => (banner.hidden = true), 4000);
}

async function save(): Promise<void> {
  if (!app.pair || !app.postId) return;
  const problems = validate(app.pair);
  if (problems.length) {
    showBanner(`cannot save: ${problems.join('; ')}`, null);
    return;
  }
  const wanted = app.pair.connections.map((c) => ({
    leftLocalId: c.leftLocalId,
    rightLocalId: c.rightLocalId,
  }));
  try {
    const stored = await api.putConnections(app.postId, app.pair.pairIndex, wanted);
    // Optimistic state is rolled back to the server's answer on mismatch.
    const storedKeys = connectionKeySet(stored);
    const localKeys = connectionKeySet(app.pair.connections);
    if (
      storedKeys.size !== localKeys.size ||
      [...storedKeys].some((k) => !localKeys.has(k))
    ) {
      app.pair = { ...app.pair, connections: stored };
    }
    app.pair = { ...app.pair, dirty: false };
    await loadPosts();
    draw();
  } catch (error) {
    showBanner(`save failed: ${describe(error)}`, null);
    draw();
  }
}

function onBlockClick(side: Side, localId: string): void {
  if (!app.pair) return;
  const result = clickBlock(app.pair, side, localId);
  if (result.kind === 'needs-confirmation') {
    const ok = window.confirm(
      `Replace the existing connection ${result.replaces.leftLocalId} -> ` +
        `${result.replaces.rightLocalId}?`,
    );
    if (ok && app.pair.selection) {
      const left = side === 'left' ? localId : app.pair.selection.localId;
      const right = side === 'right' ? localId : app.pair.selection.localId;
      app.pair = connectReplacing(app.pair, left, right);
    } else {
      app.pair = { ...app.pair, selection: null };
    }
  } else {
    app.pair = result.state;
  }
  draw();
}

async function onComment(side: Side, localId: string): Promise<void> {
  if (!app.pair || !app.postId || !app.rightPostHistoryId) return;
  const key = `${app.rightPostHistoryId}/${localId}`;
  const current = app.pair.comments[key] ?? '';
  const text = window.prompt('Comment for this block (empty clears):', current);
  if (text === null) return;
  try {
    await api.postComment(app.postId, app.rightPostHistoryId, localId, text);
    app.pair = setComment(app.pair, app.rightPostHistoryId, localId, text);
    draw();
  } catch (error) {
    showBanner(`comment failed: ${describe(error)}`, null);
  }
}

async function toggleCompareMode(): Promise<void> {
  if (!app.pair || !app.postId) return;
  if (app.pair.mode === 'compare-computed') {
    app.pair = { ...app.pair, mode: 'annotate' };
    app.flags = null;
    draw();
    return;
  }
  try {
    const computed = await api.getComputed(app.postId);
    const pair = computed.pairs.find((p) => Number(p.pairIndex) === app.pair!.pairIndex);
    app.flags = pair ? disagreementFlags(pair) : null;
    app.pair = { ...app.pair, mode: 'compare-computed' };
    draw();
  } catch (error) {
    showBanner(`computed mapping failed: ${describe(error)}`, null);
  }
}

async function exportGroundTruth(): Promise<void> {
  try {
    const body = await api.exportGroundTruth();
    const blob = new Blob([body], { type: 'text/csv' });
    const anchor = document.createElement('a');
    anchor.href = URL.createObjectURL(blob);
    anchor.download = 'ground_truth.csv';
    anchor.click();
    URL.revokeObjectURL(anchor.href);
  } catch (error) {
    showBanner(`export failed: ${describe(error)}`, null);
  }
}

function currentPairCount(): number {
  const post = app.posts.find((p) => p.postId === app.postId);
  return post ? Number(post.pairCount) : 0;
}

function stepPair(delta: number): void {
  if (!app.pair || !app.postId) return;
  const next = app.pair.pairIndex + delta;
  if (next >= 2 && next <= currentPairCount() + 1) {
    void openPair(app.postId, next);
  }
}

function stepPost(delta: number): void {
  if (!app.posts.length) return;
  const index = app.posts.findIndex((p) => p.postId === app.postId);
  const next = app.posts[(index + delta + app.posts.length) % app.posts.length];
  void openPair(next.postId, 2);
}

function nextUnannotated(): void {
  const pending = app.posts.find(
    (p) => p.pairCount !== '0' && p.annotatedPairs !== p.pairCount,
  );
  if (pending) void openPair(pending.postId, 2);
}

export function bootstrap(): void {
  el('pair').addEventListener('click', (event) => {
    const target = (event.target as HTMLElement).closest('.block') as HTMLElement | null;
    if (!target) return;
    const side = target.dataset.side as Side;
    const localId = target.dataset.localId!;
    if ((event as MouseEvent).altKey) {
      void onComment(side, localId);
    } else {
      onBlockClick(side, localId);
    }
  });
  el('posts').addEventListener('click', (event) => {
    const item = (event.target as HTMLElement).closest('.post-item') as HTMLElement | null;
    if (item) void openPair(item.dataset.postId!, 2);
  });
  el('save').addEventListener('click', () => void save());
  el('export').addEventListener('click', () => void exportGroundTruth());
  el('compare').addEventListener('click', () => void toggleCompareMode());
  document.addEventListener('keydown', (event) => {
    if (event.target instanceof HTMLInputElement) return;
    switch (event.key) {
      case 'n':
        stepPair(+1);
        break;
      case 'p':
        stepPair(-1);
        break;
      case 'N':
        stepPost(+1);
        break;
      case 'P':
        stepPost(-1);
        break;
      case 'u':
        nextUnannotated();
        break;
      case 's':
        void save();
        break;
      case 'c':
        void toggleCompareMode();
        break;
    }
  });
  void loadPosts();
}

if (typeof document !== 'undefined' && document.getElementById('pair')) {
  bootstrap();
}
