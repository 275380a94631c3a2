"""Append-only JSONL feedback store with fsync-on-write."""

import json
import os
import threading
import time


class FeedbackStore:
    """Durable user-vote log; appends are serialized behind a single lock."""

    def __init__(self, path):
        self.path = str(path)
        self._lock = threading.Lock()
        parent = os.path.dirname(self.path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        last = 0
        if os.path.isfile(self.path):
            for record in self._read_records():
                last = max(last, int(record["id"]))
        self._next_id = last + 1

    def _read_records(self):
        with open(self.path, encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    yield json.loads(line)

    def append(self, question_id: str, question: str, passage_id: str, answer_text: str, vote: str) -> str:
        """Durably append one vote; the returned id is assigned in acceptance order."""
        with self._lock:
            record = {
                "id": str(self._next_id),
                "question_id": question_id,
                "question": question,
                "passage_id": passage_id,
                "answer_text": answer_text,
                "vote": vote,
                "timestamp": int(time.time()),
            }
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(json.dumps(record, ensure_ascii=False) + "\n")
                f.flush()
                os.fsync(f.fileno())
            self._next_id += 1
            return record["id"]

    def export_lines(self):
        """Records in id order with the derived training label (up=1, down=0)."""
        if not os.path.isfile(self.path):
            return
        for record in self._read_records():
            record["label"] = 1 if record["vote"] == "up" else 0
            yield json.dumps(record, ensure_ascii=False)

    def count(self) -> int:
        if not os.path.isfile(self.path):
            return 0
        return sum(1 for _ in self._read_records())
