// Shapes mirrored from the service's JSON API. Field names match the wire
// format exactly so responses can be used without translation.

export interface SignalBreakdown {
  u_g: number;
  k_w: number;
  t_v: number;
  o_v: number;
  w_r: number;
  s_g: number;
}

export interface RankedResult {
  url: string;
  title: string;
  snippet: string;
  original_rank: number;
  revised_rank: number;
  grade: number;
  signals: SignalBreakdown;
}

export interface SearchResponse {
  query: string;
  results: RankedResult[];
}

export interface KeywordSummary {
  term: string;
  frequency: number;
  percentile: number;
}

export interface TopicSummary {
  name: string;
  topic_value: number;
  cluster: number;
}

export interface ProfileSummary {
  counts: {
    visits: number;
    keywords: number;
    topics: number;
    edges: number;
    search_patterns: number;
    offline_terms: number;
  };
  wob_bands: { present: number; prev: number; old: number };
  top_keywords: KeywordSummary[];
  top_topics: TopicSummary[];
}

export interface IngestReport {
  accepted: number;
  rejected: number;
  rejects: { line: number; reason: string }[];
}

export interface ClickFeedback {
  query: string;
  url: string;
  dwell_seconds: number;
}
