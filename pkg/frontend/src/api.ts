// Typed client for the QA service. The UI talks to exactly three endpoints:
// GET /collections, POST /ask, POST /feedback.

export interface AppConfig {
	apiBase: string;
	title: string;
}

export interface CollectionInfo {
	id: string;
	retriever: string;
	reader: string;
	retrievers: string[];
}

export interface AnswerOut {
	text: string;
	score: number;
	kind: string;
	passage_id: string;
	char_start: number | null;
	char_end: number | null;
}

export interface PassageOut {
	passage_id: string;
	score: number;
	rank: number;
	text: string;
	title: string;
}

export interface AskResponse {
	question_id: string;
	answers: AnswerOut[];
	passages: PassageOut[];
}

export interface FeedbackPayload {
	question_id: string;
	question: string;
	passage_id: string;
	answer_text: string;
	vote: 'up' | 'down';
}

export class ApiError extends Error {
	constructor(
		message: string,
		readonly status: number,
		readonly code: string,
	) {
		super(message);
	}
}

async function errorOf(resp: Response): Promise<ApiError> {
	let code = 'error';
	let message = `request failed (${resp.status})`;
	try {
		const body = await resp.json();
		if (body.code) code = body.code;
		if (body.message) message = body.message;
	} catch {
		// non-JSON error body; keep the defaults
	}
	return new ApiError(message, resp.status, code);
}

export class ApiClient {
	constructor(private readonly base: string) {}

	async collections(): Promise<CollectionInfo[]> {
		const resp = await fetch(`${this.base}/collections`);
		if (!resp.ok) throw await errorOf(resp);
		const body = await resp.json();
		return body.collections as CollectionInfo[];
	}

	async ask(question: string, collection: string): Promise<AskResponse> {
		const resp = await fetch(`${this.base}/ask`, {
			method: 'POST',
			headers: { 'Content-Type': 'application/json' },
			body: JSON.stringify({ question, collection }),
		});
		if (!resp.ok) throw await errorOf(resp);
		return (await resp.json()) as AskResponse;
	}

	async feedback(payload: FeedbackPayload): Promise<string> {
		const resp = await fetch(`${this.base}/feedback`, {
			method: 'POST',
			headers: { 'Content-Type': 'application/json' },
			body: JSON.stringify(payload),
		});
		if (resp.status !== 201) throw await errorOf(resp);
		const body = await resp.json();
		return body.id as string;
	}
}
