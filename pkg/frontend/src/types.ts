/** Wire API payload shapes. All ids are decimal strings. */

export type BlockType = 'text' | 'code';

export interface BlockPayload {
  localId: string;
  blockType: BlockType;
  content: string;
  lineCount: string;
}

export interface Connection {
  leftLocalId: string;
  rightLocalId: string;
  blockType: BlockType;
}

export interface PostSummary {
  postId: string;
  postTypeId: string;
  versionCount: string;
  pairCount: string;
  annotatedPairs: string;
}

export interface PairPayload {
  postId: string;
  pairIndex: string;
  annotated: boolean;
  left: { postHistoryId: string; blocks: BlockPayload[] };
  right: { postHistoryId: string; blocks: BlockPayload[] };
  autoConnections: Connection[];
  connections: Connection[];
  comments: Record<string, string>;
}

export interface ComputedPair {
  pairIndex: string;
  computed: Array<Connection & { similarity: number | null; equal: boolean }>;
  agreements: Array<[string, string]>;
  onlyComputed: Array<[string, string]>;
  onlyGroundTruth: Array<[string, string]>;
}

export interface ComputedPayload {
  postId: string;
  config: Record<string, unknown>;
  pairs: ComputedPair[];
}
