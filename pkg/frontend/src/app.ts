import { Api, ApiError, api as liveApi } from './api';
import { leaves, parseTree, renderTree } from './tree';
import type { QueryResponse } from './types';

export interface ChatItem {
  direction: 'user' | 'system';
  text: string;
  payload?: { term?: string; tree?: string; prob?: number | null };
  error?: boolean;
  timestamp: number;
}

/** Chat-style KB session: statements are stored, questions answered, the
 * KB panel lists facts with per-fact removal.  Every rendered state comes
 * from a completed API response. */
export class App {
  readonly items: ChatItem[] = [];
  lastSubmit: Promise<void> = Promise.resolve();

  private readonly api: Api;
  private readonly doc: Document;
  private chat!: HTMLElement;
  private input!: HTMLInputElement;
  private kbBody!: HTMLTableSectionElement;
  private kbEmpty!: HTMLElement;

  constructor(root: HTMLElement, apiImpl: Api = liveApi) {
    this.api = apiImpl;
    this.doc = root.ownerDocument;
    this.build(root);
  }

  private build(root: HTMLElement) {
    root.innerHTML = `
      <main class="layout">
        <section class="chat-panel">
          <div id="chat" class="chat"></div>
          <form id="composer" class="composer">
            <input id="input" autocomplete="off"
                   placeholder="State a fact or ask a question" />
            <button id="send" type="submit">Send</button>
          </form>
        </section>
        <aside class="kb-panel">
          <h2>Knowledge base</h2>
          <p id="kb-empty" class="kb-empty">No facts yet. Tell me something.</p>
          <table id="kb-table" class="kb-table" hidden>
            <thead><tr><th>term</th><th>source</th><th></th></tr></thead>
            <tbody></tbody>
          </table>
        </aside>
      </main>`;
    this.chat = root.querySelector('#chat')!;
    this.input = root.querySelector('#input')!;
    this.kbBody = root.querySelector('#kb-table tbody')!;
    this.kbEmpty = root.querySelector('#kb-empty')!;
    root.querySelector('#composer')!.addEventListener('submit', (event) => {
      event.preventDefault();
      const text = this.input.value.trim();
      if (!text) return;
      this.input.value = '';
      this.lastSubmit = this.submit(text);
    });
  }

  async start(): Promise<void> {
    await this.refreshKb();
  }

  /** Classify via /api/parse, then store or query; render the response. */
  async submit(text: string): Promise<void> {
    this.push({ direction: 'user', text, timestamp: Date.now() });
    try {
      const parsed = await this.api.parse(text);
      if (parsed.kind === 'statement') {
        const stored = await this.api.addStatement(text);
        this.push({
          direction: 'system',
          text: `stored ${stored.term}`,
          payload: { term: stored.term, tree: stored.tree ?? parsed.tree, prob: stored.prob },
          timestamp: Date.now(),
        });
        await this.refreshKb();
      } else {
        const answer = await this.api.query(text);
        this.push({
          direction: 'system',
          text: this.answerText(answer),
          payload: { tree: parsed.tree, prob: parsed.prob, term: parsed.term },
          timestamp: Date.now(),
        });
      }
    } catch (err) {
      this.pushError(text, err);
    }
  }

  private answerText(answer: QueryResponse): string {
    if (answer.kind === 'yesno') return answer.truth;
    if (answer.answers.length === 0) return 'no matching facts';
    return answer.answers
      .map((binding) => `${binding.term} — from: ${binding.source}`)
      .join('\n');
  }

  private pushError(text: string, err: unknown) {
    const detail =
      err instanceof ApiError ? err.detail : `network failure: ${String(err)}`;
    const item: ChatItem = {
      direction: 'system',
      text: detail,
      error: true,
      timestamp: Date.now(),
    };
    this.push(item, err instanceof ApiError ? undefined : text);
  }

  private push(item: ChatItem, retryText?: string) {
    this.items.push(item);
    const row = this.doc.createElement('div');
    row.className = `item ${item.direction}${item.error ? ' error' : ''}`;

    const bubble = this.doc.createElement('div');
    bubble.className = 'bubble';
    if (item.direction === 'system' && !item.error) {
      const answer = this.doc.createElement('span');
      answer.className = 'answer-term';
      answer.textContent = item.text;
      bubble.appendChild(answer);
    } else {
      bubble.textContent = item.text;
    }
    row.appendChild(bubble);

    if (item.payload?.tree) {
      try {
        const view = renderTree(parseTree(item.payload.tree), this.doc);
        view.classList.add('tree-view');
        row.appendChild(view);
      } catch {
        /* leave the bubble without a tree on malformed dump text */
      }
      if (item.payload.prob != null) {
        const prob = this.doc.createElement('span');
        prob.className = 'prob';
        prob.textContent = `p = ${item.payload.prob.toExponential(3)}`;
        row.appendChild(prob);
      }
    }
    if (retryText !== undefined) {
      const retry = this.doc.createElement('button');
      retry.className = 'retry';
      retry.textContent = 'retry';
      retry.addEventListener('click', () => {
        this.lastSubmit = this.submit(retryText);
      });
      row.appendChild(retry);
    }
    this.chat.appendChild(row);
  }

  /** Re-list /api/kb; called after every mutation. */
  async refreshKb(): Promise<void> {
    const facts = await this.api.listKb();
    this.kbBody.innerHTML = '';
    this.kbEmpty.hidden = facts.length > 0;
    (this.kbBody.closest('table') as HTMLElement).hidden = facts.length === 0;
    for (const fact of facts) {
      const row = this.doc.createElement('tr');
      const term = this.doc.createElement('td');
      term.className = 'kb-term';
      term.textContent = fact.term;
      const source = this.doc.createElement('td');
      source.className = 'kb-source';
      source.textContent = fact.source;
      const actions = this.doc.createElement('td');
      const remove = this.doc.createElement('button');
      remove.className = 'kb-remove';
      remove.textContent = 'remove';
      remove.addEventListener('click', () => {
        this.lastSubmit = this.removeFact(fact.source);
      });
      actions.appendChild(remove);
      row.append(term, source, actions);
      this.kbBody.appendChild(row);
    }
  }

  async removeFact(source: string): Promise<void> {
    try {
      await this.api.removeStatement(source);
      await this.refreshKb();
    } catch (err) {
      this.pushError(source, err);
    }
  }

  /** Flattened leaves of the tree attached to the last system item. */
  lastTreeLeaves(): string[] | null {
    for (let i = this.items.length - 1; i >= 0; i -= 1) {
      const tree = this.items[i].payload?.tree;
      if (tree) return leaves(parseTree(tree));
    }
    return null;
  }
}
