export {
  GROUPS,
  GROUP_ORDER,
  ConfigurationError,
  ValidationError,
  isGroupName,
  parseVideosJsonl,
  recordToJson,
  validateRecord,
} from "./schema.js";
export type { FeatureRecord, GroupName, ManifestVideo } from "./schema.js";
export {
  HashProjectionEncoder,
  TEXT_DIM,
  createTextEncoder,
  titleDescTagsText,
} from "./textEncoder.js";
export type { EncodedText, TextEncoder768 } from "./textEncoder.js";
export {
  AudioDecodeError,
  BuiltinIs09Backend,
  IS09_DIM,
  createIs09Backend,
  decodeWav,
  functionals,
} from "./is09.js";
export type { DecodedAudio, Is09Backend } from "./is09.js";
export { METADATA_FIELDS, extractMetadata } from "./metadata.js";
export { ADAPTER_NAME, ADAPTER_VERSION, runJob } from "./extract.js";
export type {
  ClipError,
  EpisodeClip,
  ExtractionJob,
  ExtractionResult,
  JobVideo,
  LockManifest,
  VideoVectorPlugin,
} from "./extract.js";
export { recordsToJsonl, writeResult } from "./jsonl.js";
export { main as cliMain } from "./cli.js";
