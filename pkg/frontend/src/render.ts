/** HTML renderers. Pure string builders so they are testable without a DOM;
 * main.ts injects the strings and wires events. */

import { lineDiff } from './diff.js';
import type { PairViewState } from './state.js';
import { blockAt, connectionFor } from './state.js';
import type { BlockPayload, ComputedPair, Connection, PostSummary } from './types.js';

const PALETTE = ['#7ca7d8', '#d8a77c', '#8fc98f', '#c98fc9', '#c9c98f', '#8fc9c9'];

export function escapeHtml(raw: string): string {
  return raw
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function renderPostList(posts: PostSummary[], activePostId: string | null): string {
  const items = posts
    .map((post) => {
      const done = post.annotatedPairs === post.pairCount && post.pairCount !== '0';
      const cls = [
        'post-item',
        post.postId === activePostId ? 'active' : '',
        done ? 'done' : '',
      ]
        .filter(Boolean)
        .join(' ');
      return (
        `<li class="${cls}" data-post-id="${post.postId}">` +
        `<span class="post-id">${post.postId}</span>` +
        `<span class="progress">${post.annotatedPairs}/${post.pairCount}</span></li>`
      );
    })
    .join('');
  return `<ul class="post-list">${items}</ul>`;
}

function connectionColor(state: PairViewState, connection: Connection): string {
  const index = state.connections.indexOf(connection);
  return PALETTE[index % PALETTE.length];
}

function renderBlock(
  state: PairViewState,
  side: 'left' | 'right',
  block: BlockPayload,
  disagreement: 'only-computed' | 'only-ground-truth' | null,
): string {
  const connection = connectionFor(state, side, block.localId);
  const selected =
    state.selection?.side === side && state.selection.localId === block.localId;
  const classes = [
    'block',
    block.blockType,
    connection ? 'connected' : 'unconnected',
    selected ? 'selected' : '',
    disagreement ?? '',
  ]
    .filter(Boolean)
    .join(' ');
  const style = connection ? ` style="border-color:${connectionColor(state, connection)}"` : '';
  const hid = side === 'left' ? 'left' : 'right';
  const commentKey = Object.keys(state.comments).find((k) => k.endsWith(`/${block.localId}`));
  const badge = commentKey
    ? `<span class="comment-badge" title="${escapeHtml(state.comments[commentKey])}">&#9998;</span>`
    : '';
  return (
    `<div class="${classes}" data-side="${hid}" data-local-id="${block.localId}"${style}>` +
    `<header>#${block.localId} ${block.blockType}${badge}</header>` +
    `<pre>${escapeHtml(block.content)}</pre></div>`
  );
}

export interface DisagreementFlags {
  onlyComputed: Set<string>;
  onlyGroundTruth: Set<string>;
}

export function disagreementFlags(pair: ComputedPair): DisagreementFlags {
  return {
    onlyComputed: new Set(pair.onlyComputed.map(([l, r]) => `${l}->${r}`)),
    onlyGroundTruth: new Set(pair.onlyGroundTruth.map(([l, r]) => `${l}->${r}`)),
  };
}

export function renderPair(
  state: PairViewState,
  flags: DisagreementFlags | null = null,
): string {
  const sides = (['left', 'right'] as const)
    .map((side) => {
      const blocks = side === 'left' ? state.leftBlocks : state.rightBlocks;
      const rendered = blocks
        .map((block) => {
          let mark: 'only-computed' | 'only-ground-truth' | null = null;
          if (flags && state.mode === 'compare-computed') {
            const touches = (key: string) =>
              side === 'left' ? key.startsWith(`${block.localId}->`) : key.endsWith(`->${block.localId}`);
            if ([...flags.onlyComputed].some(touches)) mark = 'only-computed';
            else if ([...flags.onlyGroundTruth].some(touches)) mark = 'only-ground-truth';
          }
          return renderBlock(state, side, block, mark);
        })
        .join('');
      const title = side === 'left' ? 'previous version' : 'current version';
      return `<section class="version ${side}"><h2>${title}</h2>${rendered}</section>`;
    })
    .join('');
  const message = state.message
    ? `<div class="message" role="alert">${escapeHtml(state.message)}</div>`
    : '';
  return `<div class="pair" data-pair-index="${state.pairIndex}">${message}${sides}</div>`;
}

export function renderDiffPanel(state: PairViewState): string {
  const panels = state.connections
    .map((connection) => {
      const left = blockAt(state, 'left', connection.leftLocalId);
      const right = blockAt(state, 'right', connection.rightLocalId);
      if (!left || !right) return '';
      const rows = lineDiff(left.content, right.content)
        .map((op) => `<div class="diff-line ${op.kind}">${escapeHtml(op.text) || '&nbsp;'}</div>`)
        .join('');
      return (
        `<details class="diff" open><summary>${connection.leftLocalId} &rarr; ` +
        `${connection.rightLocalId} (${connection.blockType})</summary>${rows}</details>`
      );
    })
    .join('');
  return `<aside class="diff-panel">${panels}</aside>`;
}
