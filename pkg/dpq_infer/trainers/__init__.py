from dpq_infer.trainers.engine import QueryEngine, QueryResponse, EngineState, answer, run_session
