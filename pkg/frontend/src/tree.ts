/** Parser and renderer for the engine's nested tree dump, e.g.
 * `s(np(pn(bob)),vp(v(runs)))`. */

export interface TreeNode {
  label: string;
  children: TreeNode[];
}

export function parseTree(text: string): TreeNode {
  let pos = 0;

  function node(): TreeNode {
    const start = pos;
    while (pos < text.length && !'(),'.includes(text[pos])) pos += 1;
    const label = text.slice(start, pos);
    if (!label) throw new Error(`empty label at offset ${start} in ${text}`);
    const children: TreeNode[] = [];
    if (text[pos] === '(') {
      pos += 1;
      for (;;) {
        children.push(node());
        if (text[pos] === ',') {
          pos += 1;
          continue;
        }
        if (text[pos] === ')') {
          pos += 1;
          break;
        }
        throw new Error(`unclosed tree at offset ${pos} in ${text}`);
      }
    }
    return { label, children };
  }

  const root = node();
  if (pos !== text.length) throw new Error(`trailing text at offset ${pos} in ${text}`);
  return root;
}

/** Leaf labels left to right; equals the tokens the parser consumed. */
export function leaves(node: TreeNode): string[] {
  if (node.children.length === 0) return [node.label];
  return node.children.flatMap(leaves);
}

/** Collapsible nested view: <details> per internal node, open by default. */
export function renderTree(node: TreeNode, doc: Document): HTMLElement {
  if (node.children.length === 0) {
    const leaf = doc.createElement('span');
    leaf.className = 'tree-leaf';
    leaf.textContent = node.label;
    return leaf;
  }
  const details = doc.createElement('details');
  details.className = 'tree-node';
  details.open = true;
  const summary = doc.createElement('summary');
  summary.textContent = node.label;
  details.appendChild(summary);
  const list = doc.createElement('ul');
  for (const child of node.children) {
    const item = doc.createElement('li');
    item.appendChild(renderTree(child, doc));
    list.appendChild(item);
  }
  details.appendChild(list);
  return details;
}
