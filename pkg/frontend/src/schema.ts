/**
 * Parsing and validation of the CLI's self-describing artifacts.
 *
 * Both formats carry the same payload: a schema id `xxzql.<command>/<version>`,
 * the fully resolved run config, and a list of rows.  CSV splits complex
 * columns into `_re`/`_im` pairs; JSON nests them as `{re, im}` objects and is
 * flattened here so that downstream code sees one row shape.
 */

import Papa from "papaparse";

export const SUPPORTED_SCHEMA_VERSION = 1;

export class SchemaError extends Error {}

export interface Artifact {
  /** e.g. "xxzql.quasiloc" */
  family: string;
  schemaVersion: number;
  config: Record<string, string | number | null>;
  columns: string[];
  rows: Record<string, string | number>[];
}

function parseSchemaId(id: string): { family: string; version: number } {
  const match = /^(xxzql\.[a-z-]+)\/(\d+)$/.exec(id.trim());
  if (!match) throw new SchemaError(`unrecognized schema id "${id}"`);
  return { family: match[1]!, version: Number(match[2]!) };
}

function checkVersion(version: number): void {
  if (version !== SUPPORTED_SCHEMA_VERSION) {
    throw new SchemaError(
      `schema version ${version} is not supported (expected ${SUPPORTED_SCHEMA_VERSION})`,
    );
  }
}

/** Numeric cells become numbers; everything else stays a string. */
function coerce(cell: string): string | number {
  if (cell === "") return cell;
  const num = Number(cell);
  return Number.isNaN(num) ? cell : num;
}

export function parseCsvArtifact(text: string): Artifact {
  const lines = text.split(/\r?\n/);
  let family = "";
  let version = -1;
  const config: Artifact["config"] = {};
  const body: string[] = [];
  for (const line of lines) {
    if (line.startsWith("# schema=")) {
      ({ family, version } = parseSchemaId(line.slice("# schema=".length)));
    } else if (line.startsWith("# config ")) {
      const entry = line.slice("# config ".length);
      const eq = entry.indexOf("=");
      if (eq < 0) throw new SchemaError(`malformed config line "${line}"`);
      const value = entry.slice(eq + 1);
      config[entry.slice(0, eq)] = value === "None" ? null : coerce(value);
    } else if (line.trim() !== "") {
      body.push(line);
    }
  }
  if (family === "") throw new SchemaError("artifact is missing its schema line");
  checkVersion(version);

  const parsed = Papa.parse<string[]>(body.join("\n"), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`CSV body failed to parse: ${parsed.errors[0]!.message}`);
  }
  const [header, ...records] = parsed.data;
  if (!header) throw new SchemaError("artifact has no column header");
  const rows = records.map((cells) => {
    const row: Record<string, string | number> = {};
    header.forEach((name, i) => {
      row[name] = coerce(cells[i] ?? "");
    });
    return row;
  });
  return { family, schemaVersion: version, config, columns: header, rows };
}

interface JsonDocument {
  schema: string;
  schema_version: number;
  config: Record<string, string | number | null>;
  rows: Record<string, unknown>[];
}

export function parseJsonArtifact(text: string): Artifact {
  let doc: JsonDocument;
  try {
    doc = JSON.parse(text) as JsonDocument;
  } catch (err) {
    throw new SchemaError(`artifact is not valid JSON: ${String(err)}`);
  }
  if (typeof doc.schema !== "string" || !Array.isArray(doc.rows)) {
    throw new SchemaError("JSON artifact must carry `schema` and `rows`");
  }
  const { family, version } = parseSchemaId(doc.schema);
  checkVersion(version);
  if (doc.schema_version !== version) {
    throw new SchemaError(
      `schema id says version ${version} but schema_version is ${doc.schema_version}`,
    );
  }
  const columns: string[] = [];
  const rows = doc.rows.map((raw) => {
    const row: Record<string, string | number> = {};
    for (const [key, value] of Object.entries(raw)) {
      if (value !== null && typeof value === "object" && "re" in value && "im" in value) {
        row[`${key}_re`] = Number((value as { re: number }).re);
        row[`${key}_im`] = Number((value as { im: number }).im);
      } else {
        row[key] = value as string | number;
      }
    }
    for (const key of Object.keys(row)) if (!columns.includes(key)) columns.push(key);
    return row;
  });
  return { family, schemaVersion: version, config: doc.config ?? {}, columns, rows };
}

export function parseArtifact(text: string): Artifact {
  return text.trimStart().startsWith("{") ? parseJsonArtifact(text) : parseCsvArtifact(text);
}

/** Assert the artifact comes from the expected CLI command. */
export function requireFamily(artifact: Artifact, family: string): void {
  if (artifact.family !== family) {
    throw new SchemaError(
      `expected a ${family} artifact, got ${artifact.family}`,
    );
  }
}

/** Assert all columns are present, naming the first missing one. */
export function requireColumns(artifact: Artifact, names: string[]): void {
  for (const name of names) {
    if (!artifact.columns.includes(name)) {
      throw new SchemaError(
        `artifact ${artifact.family} is missing column "${name}"`,
      );
    }
  }
}

export function numericColumn(artifact: Artifact, name: string): number[] {
  requireColumns(artifact, [name]);
  return artifact.rows.map((row) => {
    const value = row[name];
    if (typeof value !== "number") {
      throw new SchemaError(`column "${name}" holds non-numeric cell "${String(value)}"`);
    }
    return value;
  });
}
