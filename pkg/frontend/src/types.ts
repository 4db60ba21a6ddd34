// Wire shapes of the review service JSON API. Spans are always
// [start, end, "CODE"] triples with character offsets into `data`.

export type SpanTriple = [number, number, string];

export interface LabelInfo {
  code: string;
  name: string;
  definition: string;
  color: string;
}

export interface TaskView {
  abstract_id: number | string;
  data: string;
  label: SpanTriple[];
  provenance: string[];
  model_version: string | null;
  status: string;
  task_status: string;
  version: number;
  reviewer: string | null;
  sentences: [number, number][];
}

export interface SaliencyPayload {
  words: string[];
  values: number[];
  label: string;
}
