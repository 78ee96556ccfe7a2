#!/usr/bin/env python3
"""Regenerates fixtures/scripts/scripted.jsonl and fixtures/config.json.

The scripted backend matches entries on (stage tag, per-tag sequence), so the
order below must mirror the pipeline's call order over this corpus:
  judge:      3 skill scores (csv, elf, report), then the task judge
  other:      2 relation verdicts, then the team workflow body
  task_gen:   csv task, csv guideline, then 4 UNRELATED_PAIR verdicts
  env_build:  2 llm_direct files, 1 local_tool call, verify continue+finalize,
              setup bash, probe bash, verifier suite
  trajectory: 3 teacher steps
"""

import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))

QUIZ_JSON = """[
  {"id": 101, "score": 88.5},
  {"id": 102, "score": 85.5},
  {"id": 103, "score": null},
  {"id": 104, "score": 77.0}
]
"""

GRADEBOOK_CSV = """id,name,score
101,Alice Johnson,90.0
102,Bob Smith,85.5
103,Charlie Brown,82.0
104,David Williams,75.0
"""

ROSTER_CODE = """ids = [101, 102, 103, 104]
with open('/app/roster_ids.txt', 'w') as f:
    for i in ids:
        f.write(f"{i}\\n")
print('wrote', len(ids), 'ids')
"""

MERGE_PY = """import csv, json

with open('/app/quiz_data.json') as f:
    quiz = {str(row['id']): row['score'] for row in json.load(f)}

rows = []
conflicts = 0
with open('/app/gradebook.csv', newline='') as f:
    for row in csv.DictReader(f):
        sid = row['id']
        grade = float(row['score'])
        q = quiz.get(sid)
        score = grade if q is None else float(q)
        if q is not None and float(q) != grade:
            conflicts += 1
        rows.append({'id': sid, 'name': row['name'], 'score': score})

with open('/app/merged_students.csv', 'w', newline='') as f:
    w = csv.DictWriter(f, fieldnames=['id', 'name', 'score'])
    w.writeheader()
    w.writerows(rows)

with open('/app/conflicts.json', 'w') as f:
    json.dump({'total_conflicts': conflicts}, f)

print('merged', len(rows), 'rows with', conflicts, 'conflicts')"""

TEST_OUTPUTS_PY = """import csv, json, os


def load_rows():
    with open("/app/merged_students.csv", newline="") as f:
        return list(csv.DictReader(f))


def test_outputs_exist():
    assert os.path.exists("/app/merged_students.csv")
    assert os.path.exists("/app/conflicts.json")


def test_row_count():
    assert len(load_rows()) == 4


def test_priority_and_fallback():
    rows = {r["id"]: r for r in load_rows()}
    assert float(rows["101"]["score"]) == 88.5
    assert float(rows["103"]["score"]) == 82.0
    assert rows["103"]["name"] == "Charlie Brown"


def test_conflicts():
    with open("/app/conflicts.json") as f:
        data = json.load(f)
    assert data["total_conflicts"] == 2
"""

TASK_JSON = {
    "pair_relevance": "related",
    "task_title": "Merge class quiz scores",
    "instruction": (
        "I keep two score sources for my class: /app/quiz_data.json (latest "
        "quiz export) and /app/gradebook.csv (the running gradebook). Merge "
        "them into /app/merged_students.csv with header id,name,score and one "
        "row per student, preferring the quiz score when it is present and "
        "not null and falling back to the gradebook score otherwise. Count "
        "every student where both sources carry different scores and write "
        "/app/conflicts.json containing exactly {\"total_conflicts\": "
        "<count>}. A roster listing /app/roster_ids.txt is present for "
        "reference."),
    "initial_files": [
        {"filepath": "/app/quiz_data.json", "generation_mode": "llm_direct",
         "description": ("JSON array of 4 objects with keys id (int) and "
                         "score (float or null). Student 103 has score null. "
                         "Example: {\"id\": 101, \"score\": 88.5}.")},
        {"filepath": "/app/gradebook.csv", "generation_mode": "llm_direct",
         "description": ("CSV with header id,name,score and 4 rows; ids "
                         "101-104 with names Alice Johnson, Bob Smith, "
                         "Charlie Brown, David Williams and scores 90.0, "
                         "85.5, 82.0, 75.0.")},
        {"filepath": "/app/roster_ids.txt", "generation_mode": "local_tool",
         "description": ("Plain text file with the four student ids 101-104, "
                         "one per line, ascending.")},
    ],
    "setup_steps": [
        "Verify python3 with the json and csv standard modules is available."
    ],
    "evaluation_criteria": [
        ("/app/merged_students.csv exists, has header id,name,score and "
         "exactly 4 data rows"),
        ("Row 101 has score 88.5 (quiz beats gradebook) and row 103 has "
         "score 82.0 (gradebook fallback for null quiz score)"),
        "/app/conflicts.json exists and its total_conflicts value equals 2",
    ],
}

GUIDELINE_JSON = {"guideline": [
    ("Step 1: Inspect both sources -- Run 'cat /app/quiz_data.json' and "
     "'cat /app/gradebook.csv' -- confirm 4 students and that id 103 has a "
     "null quiz score."),
    ("Step 2: Write the merge script -- Create /app/merge.py implementing "
     "quiz-first priority with gradebook fallback -- verify with "
     "'ls -l /app/merge.py'."),
    ("Step 3: IMPORTANT: Treat null quiz scores as missing and fall back to "
     "the gradebook value; never coerce null to 0."),
    ("Step 4: Run 'python3 /app/merge.py' -- check the exit code with "
     "'echo $?' (expect 0)."),
    ("Step 5: Validate outputs -- Run 'cat /app/merged_students.csv' and "
     "'cat /app/conflicts.json' -- confirm 4 data rows and total_conflicts "
     "equal to 2."),
]}

JUDGE_JSON = {
    "instruction_quality": {"score": 5, "reason": "Concrete, realistic ask."},
    "solvable_closed_world": {"score": 5, "reason": "Stdlib python only."},
    "blueprint_completeness": {"score": 5, "reason": "All files specified."},
    "guideline_quality": {"score": 4, "reason": "Ordered, checkpointed."},
    "evaluation_criteria_quality": {"score": 5,
                                    "reason": "Direct pytest mapping."},
}

UNRELATED = {"pair_relevance": "unrelated",
             "reason": "No plausible scenario links this pair.",
             "task_title": "UNRELATED_PAIR"}

SCORE_33 = {"applicability": 3, "richness": 3,
            "rationale": "Squarely terminal work with concrete SOP."}

TEAM_BODY = """## Roles

### Data Cleaner (csv-data-cleaning)
Reconciles the raw sources, applies the priority rule, records conflicts.

### Report Formatter (report-formatting)
Takes the cleaned table and emits the deliverable CSV plus a JSON summary.

## Hand-off
The cleaner writes an intermediate table; the formatter owns column order,
headers and trailing newlines. Conflict counts travel in the summary JSON.
"""

STEP1 = {
    "analysis": ("Fresh shell at /app. The task merges /app/quiz_data.json "
                 "and /app/gradebook.csv with quiz-first priority."),
    "plan": ("Inspect both sources to confirm the schema and the null score "
             "for student 103."),
    "commands": [
        {"keystrokes": "cat /app/quiz_data.json\n", "duration": 0.4},
        {"keystrokes": "cat /app/gradebook.csv\n", "duration": 0.4},
    ],
}

STEP2 = {
    "analysis": ("Both sources look as described: 4 students, id 103 has a "
                 "null quiz score, gradebook carries names."),
    "plan": ("Write /app/merge.py with the priority rule and conflict "
             "counter, then run it."),
    "commands": [
        {"keystrokes": "cat > /app/merge.py <<'EOF'\n" + MERGE_PY +
                       "\nEOF\n", "duration": 0.6},
        {"keystrokes": "python3 /app/merge.py\n", "duration": 1.5},
    ],
}

STEP3 = {
    "analysis": "merge.py reported 4 rows and 2 conflicts as expected.",
    "plan": "Verify the two output files, then finish.",
    "commands": [
        {"keystrokes": "cat /app/merged_students.csv\n", "duration": 0.4},
        {"keystrokes": "cat /app/conflicts.json\n", "duration": 0.4},
    ],
    "task_complete": True,
}

SETUP_RESPONSE = """The environment only needs the Python standard library.

```bash
#!/usr/bin/env bash
set -euxo pipefail
cd /app

python3 --version
```
"""

PROBE_RESPONSE = """```bash
python3 -c 'import json, csv'
test -f /app/quiz_data.json
test -f /app/roster_ids.txt
```
"""


def entry(key, text="", tool_calls=None):
    e = {"match_key": key, "text": text}
    if tool_calls:
        e["tool_calls"] = tool_calls
    return e


def fenced_json(obj):
    return "```json\n" + json.dumps(obj, indent=2) + "\n```"


def main():
    entries = []

    # judge: three skill scores (corpus order), then the task judge
    for _ in range(3):
        entries.append(entry("judge", json.dumps(SCORE_33)))
    entries.append(entry("judge", json.dumps(JUDGE_JSON)))

    # other: relations for (csv,report) and (csv,elf), then the team body
    entries.append(entry("other", json.dumps({"relation": "ComposeWith"})))
    entries.append(entry("other", json.dumps({"relation": "DependsOn"})))
    entries.append(entry("other", TEAM_BODY))

    # task_gen: full csv task + guideline, then unrelated verdicts for the
    # remaining four primitives (elf, report, team, graph)
    entries.append(entry("task_gen", json.dumps(TASK_JSON)))
    entries.append(entry("task_gen", json.dumps(GUIDELINE_JSON)))
    for _ in range(4):
        entries.append(entry("task_gen", json.dumps(UNRELATED)))

    # env_build
    entries.append(entry("env_build", "Here is the quiz export.\n\n" +
                         fenced_json({"filepath": "/app/quiz_data.json",
                                      "content": QUIZ_JSON})))
    entries.append(entry("env_build",
                         fenced_json({"filepath": "/app/gradebook.csv",
                                      "content": GRADEBOOK_CSV})))
    entries.append(entry("env_build", "", [{
        "tool_name": "python",
        "arguments": {"target_filepath": "/app/roster_ids.txt",
                      "code": ROSTER_CODE},
    }]))
    entries.append(entry("env_build", json.dumps({
        "analysis": "Check the JSON head and the CSV row count first.",
        "status": "continue",
        "commands": ["head -c 200 /app/quiz_data.json",
                     "wc -l /app/gradebook.csv"],
    })))
    entries.append(entry("env_build", json.dumps({
        "analysis": "All three files match their specifications.",
        "status": "finalize",
        "result": {"overall_verdict": "pass", "file_findings": [],
                   "global_findings": []},
    })))
    entries.append(entry("env_build", SETUP_RESPONSE))
    entries.append(entry("env_build", PROBE_RESPONSE))
    entries.append(entry("env_build", json.dumps({
        "system_packages": [],
        "python_packages": [],
        "helper_files": [],
        "test_outputs_py": TEST_OUTPUTS_PY,
    })))

    # trajectory
    for step in (STEP1, STEP2, STEP3):
        entries.append(entry("trajectory", json.dumps(step)))

    os.makedirs(os.path.join(HERE, "scripts"), exist_ok=True)
    with open(os.path.join(HERE, "scripts", "scripted.jsonl"), "w") as f:
        for e in entries:
            f.write(json.dumps(e) + "\n")

    config = {
        "run_id": "smoke",
        "output_root": "runs",
        "corpus_dir": "fixtures/corpus",
        "personas_file": "fixtures/personas.jsonl",
        "scripted_dir": "fixtures/scripts",
        "seed": 42,
        "popularity_top_k": 1000,
        "cross_pair_budget": 50,
        "denylist": ["skill creator"],
        "backends": {"task_gen": "scripted", "env_build": "scripted",
                     "trajectory": "scripted", "judge": "scripted",
                     "other": "scripted"},
        "prices": {"scripted": {"prompt_micro_per_mtok": 1000000,
                                "completion_micro_per_mtok": 2000000}},
        "rollout": {"max_steps": 20, "context_budget_tokens": 60000,
                    "keep_recent": 5, "episode_budget_s": 600},
        "sandbox": {"driver": "local_process", "command_timeout_s": 60,
                    "task_budget_s": 600, "screen_tail_chars": 10000},
    }
    with open(os.path.join(HERE, "config.json"), "w") as f:
        json.dump(config, f, indent=2)
        f.write("\n")

    print(f"wrote {len(entries)} scripted entries")


if __name__ == "__main__":
    main()
