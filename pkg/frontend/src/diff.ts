/**
 * Scenario diffs: every edit the workbench makes is a small list of
 * reversible operations against the scenario document. Undo applies the
 * inverted list, which restores the exact prior document — the values
 * carried by each op are the original subtrees, so a round trip is
 * byte-identical under `JSON.stringify`.
 */

export type Json = null | boolean | number | string | Json[] | { [key: string]: Json };

/** Path from the document root to a container (object or array). */
export type DocPath = (string | number)[];

export type DiffOp =
  | {
      /** Replace the value of an existing key on the object at `path`. */
      kind: "assign";
      path: DocPath;
      key: string;
      before: Json;
      after: Json;
    }
  | {
      /** Replace `removed` with `inserted` at `index` in the array at `path`. */
      kind: "splice";
      path: DocPath;
      index: number;
      removed: Json[];
      inserted: Json[];
    };

export interface ScenarioDiff {
  /** Human-readable description of the edit ("draw obstacle cell", ...). */
  label: string;
  ops: DiffOp[];
}

function isObject(value: Json): value is { [key: string]: Json } {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function resolve(doc: Json, path: DocPath): Json {
  let node: Json = doc;
  for (const step of path) {
    if (typeof step === "number") {
      if (!Array.isArray(node)) throw new Error(`diff path expects an array at ${String(step)}`);
      const next = node[step];
      if (next === undefined) throw new Error(`diff path index ${step} out of range`);
      node = next;
    } else {
      if (!isObject(node)) throw new Error(`diff path expects an object at ${step}`);
      const next = node[step];
      if (next === undefined) throw new Error(`diff path key ${step} missing`);
      node = next;
    }
  }
  return node;
}

/**
 * Apply one op immutably: containers along the path are copied, all
 * untouched siblings keep their identity (and therefore their bytes).
 */
function applyOp(doc: Json, op: DiffOp): Json {
  const rebuild = (node: Json, depth: number): Json => {
    if (depth === op.path.length) {
      if (op.kind === "assign") {
        if (!isObject(node)) throw new Error("assign target is not an object");
        if (!(op.key in node)) {
          throw new Error(`assign target key ${op.key} does not exist`);
        }
        const copy: { [key: string]: Json } = {};
        for (const [key, value] of Object.entries(node)) {
          copy[key] = key === op.key ? op.after : value;
        }
        return copy;
      }
      if (!Array.isArray(node)) throw new Error("splice target is not an array");
      if (op.index < 0 || op.index > node.length) {
        throw new Error(`splice index ${op.index} out of range`);
      }
      const removed = node.slice(op.index, op.index + op.removed.length);
      if (JSON.stringify(removed) !== JSON.stringify(op.removed)) {
        throw new Error("splice removed values do not match the document");
      }
      return [...node.slice(0, op.index), ...op.inserted, ...node.slice(op.index + op.removed.length)];
    }
    const step = op.path[depth]!;
    if (typeof step === "number") {
      if (!Array.isArray(node)) throw new Error("diff path expects an array");
      const copy = node.slice();
      copy[step] = rebuild(resolve(node, [step]), depth + 1);
      return copy;
    }
    if (!isObject(node)) throw new Error("diff path expects an object");
    const copy: { [key: string]: Json } = {};
    for (const [key, value] of Object.entries(node)) {
      copy[key] = key === step ? rebuild(value, depth + 1) : value;
    }
    return copy;
  };
  return rebuild(doc, 0);
}

export function applyDiff<T extends Json>(doc: T, diff: ScenarioDiff): T {
  let next: Json = doc;
  for (const op of diff.ops) {
    next = applyOp(next, op);
  }
  return next as T;
}

export function invertOp(op: DiffOp): DiffOp {
  if (op.kind === "assign") {
    return { ...op, before: op.after, after: op.before };
  }
  return { ...op, removed: op.inserted, inserted: op.removed };
}

/** The inverse diff: inverted ops in reverse order. */
export function invertDiff(diff: ScenarioDiff): ScenarioDiff {
  return {
    label: `undo ${diff.label}`,
    ops: diff.ops.map(invertOp).reverse(),
  };
}
