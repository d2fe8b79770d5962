from dpq_infer.data.cube import CountCube, LinearQuery, UtilityRequirement, load_cube, load_query
from dpq_infer.data.history import QueryHistory, HistoryRecord, load_history, save_history
