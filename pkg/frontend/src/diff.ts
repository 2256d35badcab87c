/** LCS-based line diff for the connected-pair panel. */

export type DiffKind = 'unchanged' | 'added' | 'deleted';

export interface DiffOp {
  kind: DiffKind;
  text: string;
}

export function lineDiff(before: string, after: string): DiffOp[] {
  const a = before ? before.split('\n') : [];
  const b = after ? after.split('\n') : [];
  const la = a.length;
  const lb = b.length;
  // dp[i][j] = LCS length of a[i:], b[j:]
  const dp: number[][] = Array.from({ length: la + 1 }, () => new Array(lb + 1).fill(0));
  for (let i = la - 1; i >= 0; i--) {
    for (let j = lb - 1; j >= 0; j--) {
      dp[i][j] = a[i] === b[j] ? dp[i + 1][j + 1] + 1 : Math.max(dp[i + 1][j], dp[i][j + 1]);
    }
  }
  const ops: DiffOp[] = [];
  let i = 0;
  let j = 0;
  while (i < la && j < lb) {
    if (a[i] === b[j]) {
      ops.push({ kind: 'unchanged', text: a[i] });
      i++;
      j++;
    } else if (dp[i + 1][j] >= dp[i][j + 1]) {
      ops.push({ kind: 'deleted', text: a[i] });
      i++;
    } else {
      ops.push({ kind: 'added', text: b[j] });
      j++;
    }
  }
  for (; i < la; i++) ops.push({ kind: 'deleted', text: a[i] });
  for (; j < lb; j++) ops.push({ kind: 'added', text: b[j] });
  return ops;
}

export function applyDiff(before: string, ops: DiffOp[]): string {
  const kept = ops.filter((op) => op.kind !== 'added').map((op) => op.text);
  const expected = before ? before.split('\n') : [];
  if (kept.length !== expected.length || kept.some((line, k) => line !== expected[k])) {
    throw new Error('diff does not match the original content');
  }
  return ops
    .filter((op) => op.kind !== 'deleted')
    .map((op) => op.text)
    .join('\n');
}
