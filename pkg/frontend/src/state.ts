/** Pure pair-view state transitions; no DOM, no network.
 *
 * Connections are injective on both sides per block type and only join
 * blocks of the same type; every transition preserves that invariant and
 * the server re-validates on save.  Clicking a connected pair again
 * removes the connection; connecting onto an already-connected block
 * requires explicit confirmation and replaces the old connection.
 */

import type { BlockPayload, Connection, PairPayload } from './types.js';

export type Side = 'left' | 'right';
export type Mode = 'annotate' | 'compare-computed';

export interface Selection {
  side: Side;
  localId: string;
}

export interface PairViewState {
  postId: string;
  pairIndex: number;
  leftBlocks: BlockPayload[];
  rightBlocks: BlockPayload[];
  connections: Connection[];
  selection: Selection | null;
  comments: Record<string, string>;
  mode: Mode;
  dirty: boolean;
  message: string | null;
}

export type ConnectResult =
  | { kind: 'connected'; state: PairViewState }
  | { kind: 'disconnected'; state: PairViewState }
  | { kind: 'selected'; state: PairViewState }
  | { kind: 'rejected'; state: PairViewState; reason: string }
  | { kind: 'needs-confirmation'; state: PairViewState; replaces: Connection };

export function initialState(payload: PairPayload): PairViewState {
  // Unannotated pairs start from the automatic connections (equal-content
  // blocks unique on both sides); annotated pairs show what was saved.
  const connections = payload.annotated
    ? [...payload.connections]
    : [...payload.autoConnections];
  return {
    postId: payload.postId,
    pairIndex: Number(payload.pairIndex),
    leftBlocks: payload.left.blocks,
    rightBlocks: payload.right.blocks,
    connections,
    selection: null,
    comments: { ...payload.comments },
    mode: 'annotate',
    dirty: !payload.annotated && payload.autoConnections.length > 0,
    message: null,
  };
}

export function blockAt(state: PairViewState, side: Side, localId: string): BlockPayload | undefined {
  const blocks = side === 'left' ? state.leftBlocks : state.rightBlocks;
  return blocks.find((b) => b.localId === localId);
}

export function connectionFor(
  state: PairViewState,
  side: Side,
  localId: string,
): Connection | undefined {
  return state.connections.find((c) =>
    side === 'left' ? c.leftLocalId === localId : c.rightLocalId === localId,
  );
}

function withMessage(state: PairViewState, message: string | null): PairViewState {
  return { ...state, message };
}

/** Handle a click on a block: select, connect, disconnect, or reject. */
export function clickBlock(state: PairViewState, side: Side, localId: string): ConnectResult {
  const block = blockAt(state, side, localId);
  if (!block) {
    return { kind: 'rejected', state, reason: `no such block: ${side} ${localId}` };
  }
  if (state.selection === null) {
    return {
      kind: 'selected',
      state: { ...withMessage(state, null), selection: { side, localId } },
    };
  }
  if (state.selection.side === side) {
    // Re-selecting on the same side moves the selection.
    if (state.selection.localId === localId) {
      return { kind: 'selected', state: { ...state, selection: null } };
    }
    return { kind: 'selected', state: { ...state, selection: { side, localId } } };
  }
  const left = side === 'left' ? localId : state.selection.localId;
  const right = side === 'right' ? localId : state.selection.localId;
  return connect(state, left, right);
}

export function connect(state: PairViewState, leftLocalId: string, rightLocalId: string): ConnectResult {
  const leftBlock = blockAt(state, 'left', leftLocalId);
  const rightBlock = blockAt(state, 'right', rightLocalId);
  if (!leftBlock || !rightBlock) {
    return { kind: 'rejected', state, reason: 'block does not exist' };
  }
  if (leftBlock.blockType !== rightBlock.blockType) {
    const reason = `cannot connect ${leftBlock.blockType} to ${rightBlock.blockType}`;
    return {
      kind: 'rejected',
      state: { ...withMessage(state, reason), selection: null },
      reason,
    };
  }
  const existing = state.connections.find(
    (c) => c.leftLocalId === leftLocalId && c.rightLocalId === rightLocalId,
  );
  if (existing) {
    // Re-clicking a connected pair disconnects it.
    const connections = state.connections.filter((c) => c !== existing);
    return {
      kind: 'disconnected',
      state: { ...state, connections, selection: null, dirty: true, message: null },
    };
  }
  const occupied =
    connectionFor(state, 'left', leftLocalId) ?? connectionFor(state, 'right', rightLocalId);
  if (occupied) {
    return { kind: 'needs-confirmation', state, replaces: occupied };
  }
  return { kind: 'connected', state: applyConnection(state, leftLocalId, rightLocalId) };
}

/** Replace whatever connections touch the two blocks with the new one. */
export function connectReplacing(
  state: PairViewState,
  leftLocalId: string,
  rightLocalId: string,
): PairViewState {
  const cleared = {
    ...state,
    connections: state.connections.filter(
      (c) => c.leftLocalId !== leftLocalId && c.rightLocalId !== rightLocalId,
    ),
  };
  return applyConnection(cleared, leftLocalId, rightLocalId);
}

function applyConnection(
  state: PairViewState,
  leftLocalId: string,
  rightLocalId: string,
): PairViewState {
  const block = blockAt(state, 'left', leftLocalId)!;
  const connection: Connection = {
    leftLocalId,
    rightLocalId,
    blockType: block.blockType,
  };
  const connections = [...state.connections, connection].sort(
    (a, b) => Number(a.rightLocalId) - Number(b.rightLocalId),
  );
  return { ...state, connections, selection: null, dirty: true, message: null };
}

export function setComment(
  state: PairViewState,
  postHistoryId: string,
  localId: string,
  text: string,
): PairViewState {
  const key = `${postHistoryId}/${localId}`;
  const comments = { ...state.comments };
  if (text) {
    comments[key] = text;
  } else {
    delete comments[key];
  }
  return { ...state, comments };
}

/** Invariant check used by tests and before every save. */
export function validate(state: PairViewState): string[] {
  const problems: string[] = [];
  const leftSeen = new Set<string>();
  const rightSeen = new Set<string>();
  for (const c of state.connections) {
    const lb = blockAt(state, 'left', c.leftLocalId);
    const rb = blockAt(state, 'right', c.rightLocalId);
    if (!lb || !rb) {
      problems.push(`dangling connection ${c.leftLocalId}->${c.rightLocalId}`);
      continue;
    }
    if (lb.blockType !== rb.blockType) {
      problems.push(`type mismatch ${c.leftLocalId}->${c.rightLocalId}`);
    }
    if (leftSeen.has(c.leftLocalId)) problems.push(`left ${c.leftLocalId} connected twice`);
    if (rightSeen.has(c.rightLocalId)) problems.push(`right ${c.rightLocalId} connected twice`);
    leftSeen.add(c.leftLocalId);
    rightSeen.add(c.rightLocalId);
  }
  return problems;
}

export function connectionKeySet(connections: Connection[]): Set<string> {
  return new Set(connections.map((c) => `${c.leftLocalId}->${c.rightLocalId}`));
}

/** Parse the exported ground-truth CSV into per-(post, version) connections. */
export function parseGroundTruthExport(
  body: string,
): Map<string, Array<{ localId: string; predLocalId: string; blockType: string }>> {
  const lines = body.trim().split('\n');
  const header = lines.shift();
  if (header !== 'postId,postHistoryId,localId,blockType,predLocalId') {
    throw new Error(`unexpected export header: ${header ?? '<empty>'}`);
  }
  const out = new Map<string, Array<{ localId: string; predLocalId: string; blockType: string }>>();
  for (const line of lines) {
    if (!line) continue;
    const [postId, postHistoryId, localId, blockType, predLocalId] = line.split(',');
    const key = `${postId}/${postHistoryId}`;
    if (!out.has(key)) out.set(key, []);
    out.get(key)!.push({ localId, predLocalId, blockType });
  }
  return out;
}
