// Single-page controller: collection picker, question box, ranked answer cards
// with highlighted evidence, and one-shot thumbs-up/down feedback per answer.

import { ApiClient, AskResponse, PassageOut } from './api.js';

export interface UiState {
	collection: string | null;
	question: string;
	lastResponse: AskResponse | null;
	askedQuestion: string;
	pending: boolean;
	feedbackSent: Set<number>;
}

export function initialState(): UiState {
	return {
		collection: null,
		question: '',
		lastResponse: null,
		askedQuestion: '',
		pending: false,
		feedbackSent: new Set(),
	};
}

function el<K extends keyof HTMLElementTagNameMap>(
	tag: K,
	className?: string,
	text?: string,
): HTMLElementTagNameMap[K] {
	const node = document.createElement(tag);
	if (className) node.className = className;
	if (text !== undefined) node.textContent = text;
	return node;
}

// Highlight strictly by the API's character offsets, never by re-matching.
export function highlightedEvidence(
	passage: PassageOut,
	charStart: number | null,
	charEnd: number | null,
): HTMLElement {
	const block = el('blockquote', 'evidence');
	if (charStart === null || charEnd === null) {
		block.textContent = passage.text;
		return block;
	}
	block.append(
		document.createTextNode(passage.text.slice(0, charStart)),
		Object.assign(el('mark'), { textContent: passage.text.slice(charStart, charEnd) }),
		document.createTextNode(passage.text.slice(charEnd)),
	);
	return block;
}

export class App {
	readonly state: UiState = initialState();

	private select: HTMLSelectElement;
	private input: HTMLInputElement;
	private askButton: HTMLButtonElement;
	private banner: HTMLElement;
	private results: HTMLElement;

	constructor(
		root: HTMLElement,
		private readonly api: ApiClient,
		title: string,
	) {
		root.append(el('h1', 'title', title));
		const form = el('div', 'ask-form');
		this.select = el('select');
		this.select.id = 'collection';
		this.input = el('input');
		this.input.id = 'question';
		this.input.placeholder = 'Ask a question…';
		this.askButton = el('button', undefined, 'Ask');
		this.askButton.id = 'ask';
		form.append(this.select, this.input, this.askButton);
		this.banner = el('div', 'banner');
		this.banner.id = 'banner';
		this.banner.hidden = true;
		this.results = el('div', 'results');
		this.results.id = 'results';
		root.append(form, this.banner, this.results);

		this.select.addEventListener('change', () => {
			this.state.collection = this.select.value || null;
			this.syncControls();
		});
		this.input.addEventListener('input', () => {
			this.state.question = this.input.value;
			this.syncControls();
		});
		this.askButton.addEventListener('click', () => void this.submitQuestion());
		this.input.addEventListener('keydown', (event) => {
			if (event.key === 'Enter') void this.submitQuestion();
		});
		this.syncControls();
	}

	async init(): Promise<void> {
		try {
			const collections = await this.api.collections();
			for (const info of collections) {
				const option = el('option', undefined, info.id);
				option.value = info.id;
				this.select.append(option);
			}
			if (collections.length > 0) {
				this.state.collection = collections[0].id;
				this.select.value = collections[0].id;
			}
		} catch (err) {
			this.showError(`could not load collections: ${(err as Error).message}`);
		}
		this.syncControls();
	}

	private syncControls(): void {
		this.askButton.disabled =
			this.state.pending || this.state.question.trim() === '' || !this.state.collection;
	}

	private showError(message: string): void {
		this.banner.textContent = message;
		this.banner.hidden = false;
	}

	async submitQuestion(): Promise<void> {
		if (this.state.pending || this.state.question.trim() === '' || !this.state.collection) {
			return;
		}
		this.state.pending = true;
		this.syncControls();
		this.banner.hidden = true;
		try {
			const response = await this.api.ask(this.state.question, this.state.collection);
			this.state.lastResponse = response;
			this.state.askedQuestion = this.state.question;
			this.state.feedbackSent = new Set();
			this.renderResults();
		} catch (err) {
			this.showError((err as Error).message);
		} finally {
			this.state.pending = false;
			this.syncControls();
		}
	}

	private renderResults(): void {
		this.results.replaceChildren();
		const response = this.state.lastResponse;
		if (!response) return;
		const byId = new Map(response.passages.map((p) => [p.passage_id, p]));
		response.answers.forEach((answer, index) => {
			const card = el('div', 'card');
			card.dataset.index = String(index);
			const head = el('div', 'card-head');
			head.append(
				el('span', 'rank', `#${index + 1}`),
				el('span', 'answer-text', answer.kind === 'no_answer' ? '(no answer)' : answer.text),
				el('span', 'kind', answer.kind),
				el('span', 'score', answer.score.toFixed(4)),
			);
			card.append(head);
			const passage = byId.get(answer.passage_id);
			if (passage) {
				if (passage.title) card.append(el('div', 'passage-title', passage.title));
				card.append(highlightedEvidence(passage, answer.char_start, answer.char_end));
			}
			card.append(this.voteControls(index, answer.passage_id, answer.text));
			this.results.append(card);
		});
	}

	private voteControls(index: number, passageId: string, answerText: string): HTMLElement {
		const row = el('div', 'votes');
		const note = el('span', 'vote-note');
		for (const vote of ['up', 'down'] as const) {
			const button = el('button', `vote-${vote}`, vote === 'up' ? '👍' : '👎');
			button.addEventListener('click', () => void this.submitFeedback(index, vote, button.parentElement as HTMLElement, note));
			row.append(button);
		}
		row.append(note);
		return row;
	}

	async submitFeedback(index: number, vote: 'up' | 'down', row: HTMLElement, note: HTMLElement): Promise<void> {
		const response = this.state.lastResponse;
		if (!response || this.state.feedbackSent.has(index)) return;
		const answer = response.answers[index];
		const buttons = Array.from(row.querySelectorAll('button'));
		buttons.forEach((b) => (b.disabled = true));
		try {
			await this.api.feedback({
				question_id: response.question_id,
				question: this.state.askedQuestion,
				passage_id: answer.passage_id,
				answer_text: answer.text,
				vote,
			});
			this.state.feedbackSent.add(index);
			note.textContent = 'thanks!';
			row.classList.add('voted');
		} catch (err) {
			buttons.forEach((b) => (b.disabled = false));
			note.textContent = `feedback failed: ${(err as Error).message}`;
		}
	}
}
