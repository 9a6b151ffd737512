#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace avtext {

// Base of all toolkit errors. Subclasses add typed context where callers
// are expected to branch on it; everything else rides in what().
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- corpus / file ingestion ----

class FileNotFoundError : public Error {
public:
    explicit FileNotFoundError(const std::string& path)
        : Error("file not found: " + path) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error("i/o error: " + msg) {}
};

class MalformedRecordError : public Error {
public:
    MalformedRecordError(std::size_t line, const std::string& why)
        : Error("malformed record at line " + std::to_string(line) + ": " + why),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class DuplicateIdError : public Error {
public:
    explicit DuplicateIdError(const std::string& id)
        : Error("duplicate id: " + id), id_(id) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

class UnknownFieldError : public Error {
public:
    explicit UnknownFieldError(const std::string& field)
        : Error("unknown gold field: " + field) {}
};

class DanglingMessageIdError : public Error {
public:
    explicit DanglingMessageIdError(const std::string& msg)
        : Error("gold label references unknown message: " + msg) {}
};

class InvalidRecordError : public Error {
public:
    InvalidRecordError(std::size_t index, const std::string& why)
        : Error("invalid record at index " + std::to_string(index) + ": " + why),
          index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

// ---- runway / glossary parsing ----

class NotARunwayError : public Error {
public:
    explicit NotARunwayError(const std::string& raw)
        : Error("not a runway designator: \"" + raw + "\"") {}
};

class NotInGlossaryError : public Error {
public:
    explicit NotInGlossaryError(const std::string& code)
        : Error("not in METAR glossary: " + code), code_(code) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

class UnparseableTokenError : public Error {
public:
    explicit UnparseableTokenError(const std::string& token)
        : Error("unparseable runway token: \"" + token + "\""), token_(token) {}
    const std::string& token() const { return token_; }

private:
    std::string token_;
};

// ---- prompting ----

class EmptyInputError : public Error {
public:
    EmptyInputError() : Error("prompt input is empty") {}
};

class UnknownTemplateError : public Error {
public:
    explicit UnknownTemplateError(const std::string& id)
        : Error("unknown template: " + id) {}
};

// ---- llm / embedding backends ----

class TimeoutError : public Error {
public:
    explicit TimeoutError(const std::string& msg) : Error("timeout: " + msg) {}
};

class AuthError : public Error {
public:
    explicit AuthError(const std::string& msg) : Error("auth error: " + msg) {}
};

class MalformedResponseError : public Error {
public:
    explicit MalformedResponseError(const std::string& msg)
        : Error("malformed backend response: " + msg) {}
};

class BackendError : public Error {
public:
    BackendError(int status, const std::string& body_excerpt)
        : Error("backend error (status " + std::to_string(status) + "): " + body_excerpt),
          status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

// ---- extraction parsing ----

class MissingAnswerLineError : public Error {
public:
    explicit MissingAnswerLineError(const std::string& which)
        : Error("model output lacks labeled answer line: " + which) {}
};

class InconsistentAnswerError : public Error {
public:
    explicit InconsistentAnswerError(const std::string& msg)
        : Error("inconsistent model answer: " + msg) {}
};

// ---- retrieval ----

class EmptyDocumentError : public Error {
public:
    explicit EmptyDocumentError(const std::string& doc_id)
        : Error("document has no tokens: " + doc_id) {}
};

class InvalidVectorError : public Error {
public:
    explicit InvalidVectorError(const std::string& msg)
        : Error("invalid embedding vector: " + msg) {}
};

class DimensionMismatchError : public Error {
public:
    DimensionMismatchError(std::size_t expected, std::size_t got)
        : Error("embedding dimension mismatch: store dim " + std::to_string(expected) +
                ", vector dim " + std::to_string(got)) {}
};

class EmptyStoreError : public Error {
public:
    EmptyStoreError() : Error("vector store is empty") {}
};

class NoContextError : public Error {
public:
    NoContextError() : Error("no retrieval hits to assemble context from") {}
};

class CorruptStoreError : public Error {
public:
    explicit CorruptStoreError(const std::string& reason)
        : Error("corrupt store file: " + reason) {}
};

// ---- evaluation ----

class TypeMismatchError : public Error {
public:
    explicit TypeMismatchError(const std::string& msg)
        : Error("value type does not match field: " + msg) {}
};

class EmptyReportError : public Error {
public:
    EmptyReportError() : Error("evaluation report has no rows") {}
};

}  // namespace avtext
