//! Prompt templates for the six completion roles.
//!
//! Each builder returns the full turn list for one request. The decomposer
//! template follows a sectioned skeleton (Background, Goal, Constraint,
//! Workflow, Example, Initialization); the other roles use short single-task
//! instructions with a constrained output format where the caller needs to
//! parse the completion.

use super::{ChatTurn, Role};

/// Exact marker the decomposer emits when the original question is
/// answerable from the gathered facts. Compared after trimming.
pub const TERMINATION_MARKER: &str = "That's enough";

const DECOMPOSER_SYSTEM: &str = "\
Background:
- You are an expert at analyzing complex questions and breaking them down into a chain of simple lookups.

Goal:
- Help the user decompose their question one step at a time, and tell them when enough facts are known to answer it.

Constraint:
- Produce exactly one simple sub-question per turn, and nothing else.
- Never answer a sub-question yourself; only ask it.
- Each sub-question must stand on its own and be answerable from a single encyclopedia article.
- Use the facts gathered so far to make the next sub-question concrete instead of referring back with pronouns.
- When the gathered facts are sufficient to answer the original question, reply with exactly: That's enough

Workflow:
1. Read the original question and the facts gathered so far.
2. Decide which single fact is still missing.
3. If no fact is missing, reply with exactly: That's enough
4. Otherwise ask for the missing fact as one simple sub-question.

Example:
Original question: Who directed the film that won the 1998 Best Picture award?
(no facts yet) -> Which film won the 1998 Best Picture award?
Fact: Titanic won the 1998 Best Picture award. -> Who directed Titanic?
Fact: James Cameron directed Titanic. -> That's enough

Initialization:
Now, a first simple question.";

pub fn decomposer_turns(question: &str, prior_answers: &[String]) -> Vec<ChatTurn> {
    let mut user = format!("Original question: {question}\n");
    if prior_answers.is_empty() {
        user.push_str("Facts gathered so far: (none)");
    } else {
        user.push_str("Facts gathered so far:\n");
        for (i, a) in prior_answers.iter().enumerate() {
            let text = if a.trim().is_empty() { "unknown" } else { a.as_str() };
            user.push_str(&format!("{}. {text}\n", i + 1));
        }
    }
    vec![
        ChatTurn::new(Role::System, DECOMPOSER_SYSTEM),
        ChatTurn::new(Role::User, user.trim_end().to_string()),
    ]
}

pub fn entity_turns(sub_question: &str) -> Vec<ChatTurn> {
    vec![
        ChatTurn::new(
            Role::System,
            "Extract the single entity name the question is about. \
             Reply with the entity name only, nothing else.",
        ),
        ChatTurn::new(Role::User, format!("Question: {sub_question}")),
    ]
}

pub fn rewriter_turns(sub_question: &str, supplement: &str) -> Vec<ChatTurn> {
    vec![
        ChatTurn::new(
            Role::System,
            "Rewrite the question so it is self-contained and unambiguous, \
             using the supplementary context to fill in what the question \
             leaves implicit. Reply with the rewritten question only.",
        ),
        ChatTurn::new(
            Role::User,
            format!("Question: {sub_question}\nContext: {supplement}"),
        ),
    ]
}

pub fn filter_turns(sub_question: &str, chunk: &str, profile: Option<&str>) -> Vec<ChatTurn> {
    let mut user = format!("Question: {sub_question}\n");
    if let Some(p) = profile {
        user.push_str(&format!("Profile: {p}\n"));
    }
    user.push_str(&format!("Passage: {chunk}"));
    vec![
        ChatTurn::new(
            Role::System,
            "Judge whether the question can be answered from the passage \
             (and profile, when given) alone. Do not use outside knowledge. \
             Reply with exactly two lines:\n\
             solvable: yes or no\n\
             answer: the answer taken from the passage, left empty when solvable is no",
        ),
        ChatTurn::new(Role::User, user),
    ]
}

pub fn internal_answer_turns(sub_question: &str) -> Vec<ChatTurn> {
    vec![
        ChatTurn::new(
            Role::System,
            "Answer the question from your own knowledge, concisely. \
             Reply with the answer only.",
        ),
        ChatTurn::new(Role::User, format!("Question: {sub_question}")),
    ]
}

pub fn summarizer_turns(question: &str, sub_qa: &[(String, String)]) -> Vec<ChatTurn> {
    let mut user = format!("Original question: {question}");
    if !sub_qa.is_empty() {
        user.push_str("\nFacts:");
        for (i, (q, a)) in sub_qa.iter().enumerate() {
            let answer = if a.trim().is_empty() { "unknown" } else { a.as_str() };
            user.push_str(&format!("\n{}. {q} -> {answer}", i + 1));
        }
    }
    vec![
        ChatTurn::new(
            Role::System,
            "Combine the facts to answer the original question. \
             Reply with the final answer only, as a short phrase.",
        ),
        ChatTurn::new(Role::User, user),
    ]
}
